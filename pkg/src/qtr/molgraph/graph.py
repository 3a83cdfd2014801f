from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

BOND_ORDERS = ("single", "double", "triple", "aromatic")
BOND_SYMBOLS = {"single": "-", "double": "=", "triple": "#", "aromatic": ":"}


class GraphError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Atom:
    element: str
    aromatic: bool = False
    charge: int = 0

    @property
    def label(self) -> str:
        """Path-feature label: ``element[/a][/charge]``."""
        s = self.element
        if self.aromatic:
            s += "/a"
        if self.charge:
            s += f"/{self.charge:+d}"
        return s


@dataclass(frozen=True, slots=True)
class Bond:
    a: int
    b: int
    order: str = "single"

    @property
    def symbol(self) -> str:
        return BOND_SYMBOLS[self.order]


@dataclass(frozen=True)
class MolGraph:
    """Labeled undirected molecular graph; implicit hydrogens are not atoms."""

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...] = ()
    _adj: tuple[tuple[tuple[int, str], ...], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "bonds", tuple(self.bonds))
        if not self.atoms:
            raise GraphError("a molecule needs at least one atom")
        n = len(self.atoms)
        adj: list[list[tuple[int, str]]] = [[] for _ in range(n)]
        seen = set()
        for bond in self.bonds:
            if bond.order not in BOND_ORDERS:
                raise GraphError(f"unknown bond order {bond.order!r}")
            if not (0 <= bond.a < n and 0 <= bond.b < n) or bond.a == bond.b:
                raise GraphError(f"bad bond endpoints ({bond.a}, {bond.b})")
            key = (min(bond.a, bond.b), max(bond.a, bond.b))
            if key in seen:
                raise GraphError(f"duplicate bond between atoms {key[0]} and {key[1]}")
            seen.add(key)
            adj[bond.a].append((bond.b, bond.order))
            adj[bond.b].append((bond.a, bond.order))
        object.__setattr__(self, "_adj", tuple(tuple(x) for x in adj))

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    @property
    def num_bonds(self) -> int:
        return len(self.bonds)

    def neighbors(self, i: int) -> tuple[tuple[int, str], ...]:
        """``(neighbor index, bond order)`` pairs of atom ``i``."""
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def bond_order(self, i: int, j: int) -> str | None:
        for k, order in self._adj[i]:
            if k == j:
                return order
        return None

    def components(self) -> list[list[int]]:
        """Connected components as sorted atom-index lists, ordered by first atom."""
        seen = [False] * self.num_atoms
        out = []
        for start in range(self.num_atoms):
            if seen[start]:
                continue
            seen[start] = True
            stack, comp = [start], []
            while stack:
                i = stack.pop()
                comp.append(i)
                for j, _ in self._adj[i]:
                    if not seen[j]:
                        seen[j] = True
                        stack.append(j)
            out.append(sorted(comp))
        return out

    def subgraph(self, keep: Iterable[int]) -> MolGraph:
        """Induced subgraph on ``keep`` (atoms renumbered in ascending order)."""
        keep = sorted(set(keep))
        remap = {old: new for new, old in enumerate(keep)}
        bonds = [
            Bond(remap[b.a], remap[b.b], b.order)
            for b in self.bonds
            if b.a in remap and b.b in remap
        ]
        return MolGraph(tuple(self.atoms[i] for i in keep), tuple(bonds))

    def without_atom(self, i: int) -> MolGraph:
        if not 0 <= i < self.num_atoms:
            raise GraphError(f"atom index {i} out of range")
        return self.subgraph(k for k in range(self.num_atoms) if k != i)

    def without_bond(self, k: int) -> MolGraph:
        if not 0 <= k < self.num_bonds:
            raise GraphError(f"bond index {k} out of range")
        return MolGraph(self.atoms, self.bonds[:k] + self.bonds[k + 1 :])

    def split_components(self) -> list[MolGraph]:
        return [self.subgraph(c) for c in self.components()]


def make_graph(atoms: Sequence[Atom | str], bonds: Sequence[tuple] = ()) -> MolGraph:
    """Convenience constructor: atoms may be bare element strings, bonds plain tuples."""
    atom_objs = tuple(a if isinstance(a, Atom) else Atom(a) for a in atoms)
    bond_objs = tuple(b if isinstance(b, Bond) else Bond(*b) for b in bonds)
    return MolGraph(atom_objs, bond_objs)
