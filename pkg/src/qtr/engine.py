"""Filter-and-verify superstructure search."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .balltree import BallTree, SearchStats
from .fingerprinter import FpConfig, fingerprint
from .molgraph import MolGraph, SmilesError, parse_smiles, sub_structure
from .store import FingerprintStore

DEFAULT_LIMIT = 10_000


class QueryError(ValueError):
    pass


@dataclass
class QueryStats:
    candidates: int = 0
    answers: int = 0
    false_positives: int = 0
    truncated: bool = False
    timed_out: bool = False
    filter: SearchStats = field(default_factory=SearchStats)
    filter_seconds: float = 0.0
    verify_seconds: float = 0.0

    def lines(self) -> list[str]:
        return [
            f"candidates: {self.candidates}",
            f"answers: {self.answers}",
            f"false_positives: {self.false_positives}",
            f"truncated: {str(self.truncated).lower()}",
            f"nodes_visited: {self.filter.nodes_visited}",
            f"leaves_scanned: {self.filter.leaves_scanned}",
            f"fingerprints_compared: {self.filter.fingerprints_compared}",
            f"filter_seconds: {self.filter_seconds:.6f}",
            f"verify_seconds: {self.verify_seconds:.6f}",
        ]


@dataclass
class QueryResult:
    ids: list[int]
    stats: QueryStats


def _unpack_index(index) -> tuple[FingerprintStore, BallTree]:
    store, tree = index
    return store, tree


def _verify_one(args: tuple[MolGraph, str]) -> bool:
    query, smiles = args
    return sub_structure(query, parse_smiles(smiles))


def find_meta_structures(
    query: str | MolGraph,
    index,
    limit: int | None = DEFAULT_LIMIT,
    *,
    method: str = "tree",
    deadline: float | None = None,
    workers: int | None = None,
    clock=time.perf_counter,
) -> QueryResult:
    """Molecule ids in ``index`` that contain ``query`` as a substructure.

    ``index`` is an ``(store, tree)`` pair. Candidates come from the tree
    (``method="tree"``) or a full scan (``method="linear"``), are expanded to
    molecule ids, and verified in filter order until ``limit`` answers are
    found. ``deadline`` is a ``clock()`` value; once passed, the
    query stops and reports ``timed_out``. ``workers > 1`` verifies in a
    process pool without changing result order.
    """
    store, tree = _unpack_index(index)
    if isinstance(query, str):
        try:
            q = parse_smiles(query)
        except SmilesError as exc:
            raise QueryError(f"cannot parse query {query!r}: {exc}") from None
    else:
        q = query
    cfg = store.cfg or FpConfig(fl=store.fl)
    stats = QueryStats()

    t0 = clock()
    f = fingerprint(q, cfg)
    if method == "tree":
        found = tree.find_in_subtree(f)
        candidates = [m for fid in found.ids for m in store.molecules_for(fid)]
        stats.filter = found.stats
    elif method == "linear":
        candidates = store.linear_scan(f)
        stats.filter = SearchStats(0, 0, len(store))
    else:
        raise ValueError(f"unknown method {method!r}")
    t1 = clock()
    stats.filter_seconds = t1 - t0
    stats.candidates = len(candidates)

    answers: list[int] = []
    examined = 0
    if workers and workers > 1 and candidates:
        jobs = [(q, store.smiles[store.record_of_id[m]]) for m in candidates]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(_verify_one, jobs, chunksize=64))
        for m, ok in zip(candidates, verdicts):
            examined += 1
            if ok:
                answers.append(m)
                if limit is not None and len(answers) >= limit:
                    break
    else:
        for m in candidates:
            if deadline is not None and clock() > deadline:
                stats.timed_out = True
                break
            examined += 1
            if sub_structure(q, store.molecule(m)):
                answers.append(m)
                if limit is not None and len(answers) >= limit:
                    break
    stats.verify_seconds = clock() - t1
    stats.answers = len(answers)
    stats.truncated = limit is not None and len(answers) >= limit and examined < len(candidates)
    stats.false_positives = examined - len(answers)
    return QueryResult(answers, stats)


def brute_force(query: str | MolGraph, store: FingerprintStore) -> list[int]:
    """Verify every molecule in the store; the ground truth for tests and audits."""
    q = parse_smiles(query) if isinstance(query, str) else query
    return [m for m in store.mol_ids if sub_structure(q, store.molecule(m))]
