"""Synthetic corpora: random fingerprints, clustered fingerprints, random molecules."""

from __future__ import annotations

import random

import numpy as np

from ..bitfp import Fingerprint, words_for
from ..molgraph import Atom, Bond, MolGraph
from ..store import FingerprintStore

_CHUNK = 8192


def _pack_bits(bits: np.ndarray, fl: int) -> np.ndarray:
    packed = np.packbits(bits.astype(np.uint8), axis=1)
    nbytes = 8 * words_for(fl)
    if packed.shape[1] < nbytes:
        packed = np.pad(packed, ((0, 0), (0, nbytes - packed.shape[1])))
    return packed


def random_matrix(n: int, fl: int, density: float, rng: np.random.Generator) -> np.ndarray:
    """``n`` packed rows with each bit set independently with probability ``density``."""
    parts = []
    for start in range(0, n, _CHUNK):
        m = min(_CHUNK, n - start)
        parts.append(_pack_bits(rng.random((m, fl), dtype=np.float32) < density, fl))
    return np.concatenate(parts) if parts else np.zeros((0, 8 * words_for(fl)), np.uint8)


def uniform_store(n: int, fl: int, density: float, seed: int = 0) -> FingerprintStore:
    rng = np.random.default_rng(seed)
    return FingerprintStore.from_matrix(random_matrix(n, fl, density, rng), fl)


def cluster_signature(cluster: int, width: int = 8) -> list[int]:
    return list(range(cluster * width, (cluster + 1) * width))


def clustered_store(
    n: int,
    fl: int,
    clusters: int = 2,
    density: float = 0.05,
    signature_bits: int = 8,
    seed: int = 0,
) -> FingerprintStore:
    """Fingerprints in ``clusters`` equal groups with disjoint signature bits.

    Cluster ``c`` owns bits ``[c*signature_bits, (c+1)*signature_bits)`` and
    every member has all of them set; other signature bits are never set.
    Remaining bits are random background at ``density``. Records are
    interleaved across clusters.
    """
    if clusters * signature_bits >= fl:
        raise ValueError("signatures do not fit in the fingerprint")
    rng = np.random.default_rng(seed)
    sig_end = clusters * signature_bits
    parts = []
    for start in range(0, n, _CHUNK):
        m = min(_CHUNK, n - start)
        bits = rng.random((m, fl), dtype=np.float32) < density
        bits[:, :sig_end] = False
        owner = (np.arange(start, start + m) % clusters)
        for c in range(clusters):
            rows = owner == c
            bits[np.ix_(rows, cluster_signature(c, signature_bits))] = True
        parts.append(_pack_bits(bits, fl))
    return FingerprintStore.from_matrix(np.concatenate(parts), fl)


def cluster_queries(
    store: FingerprintStore,
    count: int,
    clusters: int = 2,
    signature_bits: int = 8,
    extra_bits: int = 2,
    seed: int = 0,
) -> list[Fingerprint]:
    """Queries made of one cluster signature bit plus a few bits of a random member."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        c = k % clusters
        sig = rng.choice(cluster_signature(c, signature_bits))
        rec = rng.randrange(c, len(store), clusters)
        member = store.fingerprint(int(store.fp_of_record[rec]))
        background = [i for i in member.indices() if i >= clusters * signature_bits]
        picks = rng.sample(background, min(extra_bits, len(background)))
        out.append(Fingerprint.from_indices([sig, *picks], store.fl))
    return out


def random_query(fl: int, density: float, rng: random.Random) -> Fingerprint:
    return Fingerprint.from_indices([i for i in range(fl) if rng.random() < density], fl)


# molecules

_VALENCE = {"C": 4, "N": 3, "O": 2, "S": 2, "F": 1, "Cl": 1, "Br": 1, "P": 3}
_ELEMENTS = ["C"] * 8 + ["N", "N", "O", "O", "S", "F", "Cl", "Br", "P"]
_AROMATIC_RING = ["C", "C", "C", "C", "C", "N", "S"]


def random_molecule(rng: random.Random, n_atoms: int = 12) -> MolGraph:
    """A random connected molecule-like graph with chains, rings and charges.

    Valence limits are loose chemistry; the point is label and bond variety.
    """
    atoms: list[Atom] = []
    bonds: list[Bond] = []
    pairs: set[tuple[int, int]] = set()
    free: list[int] = []

    def add_atom(atom: Atom, valence: int) -> int:
        atoms.append(atom)
        free.append(valence)
        return len(atoms) - 1

    def add_bond(a: int, b: int, order: str, cost: int) -> None:
        bonds.append(Bond(a, b, order))
        pairs.add((min(a, b), max(a, b)))
        free[a] -= cost
        free[b] -= cost

    def attach_point() -> int | None:
        open_atoms = [i for i, v in enumerate(free) if v > 0]
        return rng.choice(open_atoms) if open_atoms else None

    if rng.random() < 0.45:
        # aromatic six-ring seed
        ring = []
        for k in range(6):
            el = "C" if k == 0 else rng.choice(_AROMATIC_RING)
            ring.append(add_atom(Atom(el, aromatic=True), 3 if el == "C" else 2))
        for k in range(6):
            add_bond(ring[k], ring[(k + 1) % 6], "aromatic", 1)
    else:
        add_atom(Atom("C"), 4)

    while len(atoms) < n_atoms:
        host = attach_point()
        if host is None:
            break
        el = rng.choice(_ELEMENTS)
        charge = 0
        valence = _VALENCE[el]
        if el == "N" and rng.random() < 0.1:
            charge, valence = 1, 4
        elif el == "O" and rng.random() < 0.1:
            charge, valence = -1, 1
        new = add_atom(Atom(el, charge=charge), valence)
        room = min(free[host], free[new])
        r = rng.random()
        if room >= 3 and r < 0.05:
            add_bond(host, new, "triple", 3)
        elif room >= 2 and r < 0.2:
            add_bond(host, new, "double", 2)
        else:
            add_bond(host, new, "single", 1)

    # a few aliphatic ring closures
    for _ in range(rng.randint(0, 2)):
        cands = [i for i, v in enumerate(free) if v > 0 and not atoms[i].aromatic]
        if len(cands) < 2:
            break
        a, b = rng.sample(cands, 2)
        if (min(a, b), max(a, b)) not in pairs:
            add_bond(a, b, "single", 1)
    return MolGraph(tuple(atoms), tuple(bonds))


def random_fragment(g: MolGraph, rng: random.Random, deletions: int = 3) -> MolGraph:
    """Delete random atoms/bonds from ``g``; the result may be disconnected but is never empty."""
    for _ in range(deletions):
        if g.num_bonds and (g.num_atoms == 1 or rng.random() < 0.5):
            g = g.without_bond(rng.randrange(g.num_bonds))
        elif g.num_atoms > 1:
            g = g.without_atom(rng.randrange(g.num_atoms))
    return g


def largest_component(g: MolGraph) -> MolGraph:
    comps = g.components()
    best = max(comps, key=len)
    return g.subgraph(best)
