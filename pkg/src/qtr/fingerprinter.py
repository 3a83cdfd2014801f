"""Hashed linear-path fingerprints.

Every simple path of up to ``max_path_len`` bonds becomes a feature string of
alternating atom labels and bond symbols, read in whichever direction sorts
first. Simple paths of a subgraph are simple paths of the whole graph, so a
substructure's fingerprint is always a submask of its superstructure's.

Hashing is 64-bit FNV-1a (offset basis ``0xcbf29ce484222325``, prime
``0x100000001b3``) over the UTF-8 feature string. Stream ``s`` starts from
``basis ^ ((hash_seed + s * 0x9e3779b97f4a7c15) mod 2**64)`` and sets bit
``hash mod fl``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .bitfp import Fingerprint
from .molgraph import MolGraph

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
STREAM_STEP = 0x9E3779B97F4A7C15
DEFAULT_SEED = 0x5154524953454544
_M64 = (1 << 64) - 1


@dataclass(frozen=True)
class FpConfig:
    fl: int = 2048
    max_path_len: int = 5
    bits_per_feature: int = 2
    hash_seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.fl <= 0 or self.fl % 64:
            raise ValueError(f"fl must be a positive multiple of 64, got {self.fl}")
        if self.max_path_len < 0:
            raise ValueError(f"max_path_len must be >= 0, got {self.max_path_len}")
        if not 1 <= self.bits_per_feature <= 4:
            raise ValueError(f"bits_per_feature must be in 1..4, got {self.bits_per_feature}")
        if not 0 <= self.hash_seed <= _M64:
            raise ValueError("hash_seed must fit in 64 bits")


def fnv1a_64(data: bytes, basis: int = FNV_OFFSET) -> int:
    h = basis
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _M64
    return h


@lru_cache(maxsize=1 << 16)
def feature_bits(feature: str, fl: int, streams: int, seed: int) -> tuple[int, ...]:
    data = feature.encode("utf-8")
    return tuple(
        fnv1a_64(data, FNV_OFFSET ^ ((seed + s * STREAM_STEP) & _M64)) % fl
        for s in range(streams)
    )


def path_features(m: MolGraph, max_path_len: int) -> set[str]:
    """Canonical feature strings of all simple paths with at most ``max_path_len`` bonds."""
    labels = [a.label for a in m.atoms]
    out = set(labels)
    if max_path_len == 0:
        return out
    symbols = {"single": "-", "double": "=", "triple": "#", "aromatic": ":"}
    adj = [[(j, symbols[o]) for j, o in m.neighbors(i)] for i in range(m.num_atoms)]
    on_path = [False] * m.num_atoms

    def walk(start: int, u: int, fwd: str, rev: str, depth: int) -> None:
        for v, sym in adj[u]:
            if on_path[v]:
                continue
            f = fwd + sym + labels[v]
            r = labels[v] + sym + rev
            # each undirected path is reached from both ends; keep one
            if start < v:
                out.add(f if f <= r else r)
            if depth + 1 < max_path_len:
                on_path[v] = True
                walk(start, v, f, r, depth + 1)
                on_path[v] = False

    for i in range(m.num_atoms):
        on_path[i] = True
        walk(i, i, labels[i], labels[i], 0)
        on_path[i] = False
    return out


def fingerprint(m: MolGraph, cfg: FpConfig = FpConfig()) -> Fingerprint:
    value = 0
    top = cfg.fl - 1
    for feature in path_features(m, cfg.max_path_len):
        for bit in feature_bits(feature, cfg.fl, cfg.bits_per_feature, cfg.hash_seed):
            value |= 1 << (top - bit)
    return Fingerprint(value, cfg.fl)
