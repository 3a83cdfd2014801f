"""Substructure predicate by VF2-style backtracking.

The query is matched as a (not necessarily induced) subgraph: atoms map
injectively onto target atoms with identical element, aromatic flag and
charge, and every query bond must map onto a target bond of the same order.
"""

from __future__ import annotations

from collections import Counter

from .graph import MolGraph


def _match_order(q: MolGraph) -> list[int]:
    """Query atoms ordered so each atom is adjacent to an earlier one when possible.

    Disconnected queries come out component by component, each component
    started from its highest-degree atom.
    """
    n = q.num_atoms
    placed = [False] * n
    links = [0] * n
    order: list[int] = []
    for _ in range(n):
        best = -1
        for i in range(n):
            if placed[i]:
                continue
            if best < 0 or (links[i], q.degree(i)) > (links[best], q.degree(best)):
                best = i
        placed[best] = True
        order.append(best)
        for j, _ in q.neighbors(best):
            links[j] += 1
    return order


def find_embedding(q: MolGraph, t: MolGraph) -> dict[int, int] | None:
    """Return one query-atom -> target-atom mapping, or ``None`` if none exists."""
    if q.num_atoms > t.num_atoms or q.num_bonds > t.num_bonds:
        return None
    t_labels = Counter(t.atoms)
    for atom, count in Counter(q.atoms).items():
        if t_labels[atom] < count:
            return None
    t_orders = Counter(b.order for b in t.bonds)
    for order, count in Counter(b.order for b in q.bonds).items():
        if t_orders[order] < count:
            return None

    order = _match_order(q)
    position = {a: k for k, a in enumerate(order)}
    # for each query atom: bonds back to atoms placed earlier
    back: list[list[tuple[int, str]]] = []
    for a in order:
        back.append([(j, o) for j, o in q.neighbors(a) if position[j] < position[a]])

    by_label: dict = {}
    for i, atom in enumerate(t.atoms):
        by_label.setdefault(atom, []).append(i)
    t_adj = [dict(t.neighbors(i)) for i in range(t.num_atoms)]

    mapping: dict[int, int] = {}
    used = [False] * t.num_atoms

    def candidates(k: int):
        a = order[k]
        if back[k]:
            j, o = back[k][0]
            return [v for v, vo in t.neighbors(mapping[j]) if vo == o]
        return by_label.get(q.atoms[a], [])

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        a = order[k]
        atom, deg = q.atoms[a], q.degree(a)
        for v in candidates(k):
            if used[v] or t.atoms[v] != atom or len(t_adj[v]) < deg:
                continue
            if any(t_adj[v].get(mapping[j]) != o for j, o in back[k]):
                continue
            mapping[a] = v
            used[v] = True
            if extend(k + 1):
                return True
            used[v] = False
            del mapping[a]
        return False

    return dict(mapping) if extend(0) else None


def sub_structure(q: MolGraph, t: MolGraph) -> bool:
    """True iff ``q`` embeds into ``t``."""
    return find_embedding(q, t) is not None
