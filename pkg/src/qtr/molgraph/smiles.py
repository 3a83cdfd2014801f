"""Reader and writer for a deterministic SMILES subset.

Supported: organic-subset atoms, lowercase aromatic atoms, bracket atoms with
optional hydrogen count (ignored) and charge, bonds ``- = # :``, branches,
ring closures (``1``-``9`` and ``%nn``) and ``.`` component separators.
Stereochemistry, isotopes, atom classes and wildcards are rejected.
"""

from __future__ import annotations

from .graph import Atom, Bond, GraphError, MolGraph

ORGANIC = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}
AROMATIC_ORGANIC = {"b", "c", "n", "o", "p", "s"}
AROMATIC_BRACKET = {"b", "c", "n", "o", "p", "s", "se", "as", "te"}

ELEMENTS = set(
    """H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni
    Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe
    Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg
    Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr Rf Db Sg
    Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og""".split()
)

_BOND_CHARS = {"-": "single", "=": "double", "#": "triple", ":": "aromatic"}
_UNSUPPORTED = {
    "/": "directional bonds",
    "\\": "directional bonds",
    "@": "stereochemistry",
    "*": "wildcard atoms",
    "$": "quadruple bonds",
}


class SmilesError(ValueError):
    """Parse failure; ``offset`` is the byte offset of the offending token."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


def _default_order(a: Atom, b: Atom) -> str:
    return "aromatic" if a.aromatic and b.aromatic else "single"


class _Parser:
    def __init__(self, text: str) -> None:
        self.s = text
        self.pos = 0
        self.atoms: list[Atom] = []
        self.bonds: list[Bond] = []
        self.pairs: set[tuple[int, int]] = set()
        self.prev: int | None = None
        self.pending: tuple[str, int] | None = None  # (order, offset)
        self.branches: list[tuple[int, int]] = []  # (atom, offset of "(")
        self.rings: dict[int, tuple[int, str | None, int]] = {}

    def error(self, msg: str, offset: int | None = None) -> SmilesError:
        return SmilesError(msg, self.pos if offset is None else offset)

    def byte_offset(self, pos: int) -> int:
        return len(self.s[:pos].encode("utf-8"))

    def parse(self) -> MolGraph:
        s = self.s
        while self.pos < len(s):
            c = s[self.pos]
            if c == "(":
                if self.prev is None or self.pending:
                    raise self.error("branch must follow an atom")
                self.branches.append((self.prev, self.pos))
                self.pos += 1
            elif c == ")":
                if not self.branches:
                    raise self.error("unmatched ')'")
                if self.pending or s[self.pos - 1] == "(":
                    raise self.error("empty branch or dangling bond")
                self.prev = self.branches.pop()[0]
                self.pos += 1
            elif c in _BOND_CHARS:
                if self.prev is None or self.pending:
                    raise self.error(f"unexpected bond {c!r}")
                self.pending = (_BOND_CHARS[c], self.pos)
                self.pos += 1
            elif c == ".":
                if self.prev is None or self.pending or self.branches:
                    raise self.error("unexpected '.'")
                self.prev = None
                self.pos += 1
            elif c.isdigit() or c == "%":
                self.ring_closure()
            elif c == "[":
                self.add_atom(self.bracket_atom())
            elif c in _UNSUPPORTED:
                raise self.error(f"unsupported token {c!r} ({_UNSUPPORTED[c]})")
            else:
                self.add_atom(self.organic_atom())
        if self.pending:
            raise self.error("dangling bond", self.pending[1])
        if self.branches:
            raise self.error("unclosed branch", self.branches[-1][1])
        if self.rings:
            digit, (_, _, offset) = min(self.rings.items(), key=lambda kv: kv[1][2])
            raise self.error(f"unmatched ring-closure digit {digit}", offset)
        if self.prev is None and self.atoms:
            raise self.error("trailing '.'")
        return MolGraph(tuple(self.atoms), tuple(self.bonds))

    def organic_atom(self) -> Atom:
        s, p = self.s, self.pos
        two = s[p : p + 2]
        if two in ("Cl", "Br"):
            self.pos += 2
            return Atom(two)
        c = s[p]
        if c in ORGANIC:
            self.pos += 1
            return Atom(c)
        if c in AROMATIC_ORGANIC:
            self.pos += 1
            return Atom(c.upper(), aromatic=True)
        raise self.error(f"unsupported token {c!r}")

    def bracket_atom(self) -> Atom:
        s = self.s
        start = self.pos
        end = s.find("]", start)
        if end < 0:
            raise self.error("unclosed bracket atom")
        body = s[start + 1 : end]
        i = 0
        if body[:1].isdigit():
            raise self.error("isotopes are not supported", start + 1)
        sym2, sym1 = body[:2], body[:1]
        if sym2 in ELEMENTS:
            element, aromatic, i = sym2, False, 2
        elif sym2 in AROMATIC_BRACKET:
            element, aromatic, i = sym2.capitalize(), True, 2
        elif sym1 in ELEMENTS:
            element, aromatic, i = sym1, False, 1
        elif sym1 in AROMATIC_BRACKET:
            element, aromatic, i = sym1.upper(), True, 1
        else:
            raise self.error(f"unknown element in bracket atom [{body}]", start + 1)
        # explicit hydrogen count is accepted but not materialized
        if body[i : i + 1] == "H":
            i += 1
            while body[i : i + 1].isdigit():
                i += 1
        charge = 0
        if body[i : i + 1] in ("+", "-"):
            sign = 1 if body[i] == "+" else -1
            j = i + 1
            if body[j : j + 1].isdigit():
                k = j
                while body[k : k + 1].isdigit():
                    k += 1
                charge = sign * int(body[j:k])
                i = k
            else:
                n = 1
                while body[j : j + 1] == body[i]:
                    n += 1
                    j += 1
                charge = sign * n
                i = j
        if i != len(body):
            bad = body[i]
            what = _UNSUPPORTED.get(bad, "unsupported bracket-atom syntax")
            raise self.error(f"unsupported token {bad!r} ({what})", start + 1 + i)
        self.pos = end + 1
        return Atom(element, aromatic, charge)

    def add_atom(self, atom: Atom) -> None:
        idx = len(self.atoms)
        self.atoms.append(atom)
        if self.prev is not None:
            order = self.pending[0] if self.pending else _default_order(self.atoms[self.prev], atom)
            self.add_bond(self.prev, idx, order, self.pos)
        self.pending = None
        self.prev = idx

    def add_bond(self, a: int, b: int, order: str, offset: int) -> None:
        key = (min(a, b), max(a, b))
        if a == b or key in self.pairs:
            raise self.error("ring closure duplicates an existing bond", offset)
        self.pairs.add(key)
        self.bonds.append(Bond(a, b, order))

    def ring_closure(self) -> None:
        s, start = self.s, self.pos
        if s[start] == "%":
            digits = s[start + 1 : start + 3]
            if len(digits) != 2 or not digits.isdigit():
                raise self.error("'%' must be followed by two digits")
            num = int(digits)
            self.pos += 3
        else:
            num = int(s[start])
            self.pos += 1
        if self.prev is None:
            raise self.error("ring closure must follow an atom", start)
        order = self.pending[0] if self.pending else None
        self.pending = None
        if num in self.rings:
            other, other_order, _ = self.rings.pop(num)
            if order and other_order and order != other_order:
                raise self.error(f"conflicting bond orders on ring closure {num}", start)
            order = order or other_order or _default_order(self.atoms[other], self.atoms[self.prev])
            self.add_bond(other, self.prev, order, start)
        else:
            self.rings[num] = (self.prev, order, start)


def parse_smiles(text: str) -> MolGraph:
    """Parse ``text`` into a :class:`MolGraph`.

    Raises :class:`SmilesError` carrying the byte offset of the problem.
    """
    if not text or not text.strip():
        raise SmilesError("empty SMILES", 0)
    text = text.strip()
    parser = _Parser(text)
    try:
        return parser.parse()
    except SmilesError as exc:
        # positions are tracked per character; report bytes
        raise SmilesError(exc.message, parser.byte_offset(exc.offset)) from None
    except GraphError as exc:
        raise SmilesError(str(exc), 0) from None


# writer


def _atom_token(atom: Atom) -> str:
    if atom.charge == 0:
        if not atom.aromatic and atom.element in ORGANIC:
            return atom.element
        if atom.aromatic and atom.element.lower() in AROMATIC_ORGANIC:
            return atom.element.lower()
    sym = atom.element
    if atom.aromatic:
        sym = sym.lower()
        if sym not in AROMATIC_BRACKET:
            raise ValueError(f"cannot write aromatic {atom.element} in SMILES")
    if atom.charge in (1, -1):
        charge = "+" if atom.charge > 0 else "-"
    elif atom.charge:
        charge = f"{atom.charge:+d}"
    else:
        charge = ""
    return f"[{sym}{charge}]"


def _bond_token(g: MolGraph, a: int, b: int, order: str) -> str:
    if order == _default_order(g.atoms[a], g.atoms[b]):
        return ""
    return {"single": "-", "double": "=", "triple": "#", "aromatic": ":"}[order]


def write_smiles(g: MolGraph) -> str:
    """Write ``g`` in the supported subset; ``parse_smiles`` reads it back to an isomorphic graph."""
    n = g.num_atoms
    visited = [False] * n
    children: list[list[int]] = [[] for _ in range(n)]
    ring_opens: list[list[int]] = [[] for _ in range(n)]  # ring-bond partner atoms, opened here
    ring_closes: list[list[int]] = [[] for _ in range(n)]
    seen_edges: set[tuple[int, int]] = set()
    roots = []

    def dfs(u: int) -> None:
        visited[u] = True
        for v, _ in sorted(g.neighbors(u)):
            key = (min(u, v), max(u, v))
            if key in seen_edges:
                continue
            seen_edges.add(key)
            if visited[v]:
                ring_opens[v].append(u)
                ring_closes[u].append(v)
            else:
                children[u].append(v)
                dfs(v)

    for start in range(n):
        if not visited[start]:
            roots.append(start)
            dfs(start)

    free: list[int] = []
    next_num = 1
    numbers: dict[tuple[int, int], int] = {}

    def ring_token(num: int) -> str:
        return str(num) if num < 10 else f"%{num:02d}"

    def emit(u: int, out: list[str]) -> None:
        nonlocal next_num
        out.append(_atom_token(g.atoms[u]))
        for v in ring_closes[u]:
            num = numbers.pop((v, u))
            out.append(ring_token(num))
            free.append(num)
        for v in ring_opens[u]:
            if free:
                free.sort()
                num = free.pop(0)
            else:
                num = next_num
                next_num += 1
            if num > 99:
                raise ValueError("too many simultaneous ring closures")
            numbers[(u, v)] = num
            out.append(_bond_token(g, u, v, g.bond_order(u, v)))
            out.append(ring_token(num))
        kids = children[u]
        for i, v in enumerate(kids):
            last = i == len(kids) - 1
            if not last:
                out.append("(")
            out.append(_bond_token(g, u, v, g.bond_order(u, v)))
            emit(v, out)
            if not last:
                out.append(")")

    parts = []
    for r in roots:
        out: list[str] = []
        emit(r, out)
        parts.append("".join(out))
    return ".".join(parts)
