"""Single-threaded benchmark loop comparing the tree filter against a full scan."""

from __future__ import annotations

import csv
import io
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path

from ..bitfp import Fingerprint
from ..engine import find_meta_structures
from ..molgraph import SmilesError, parse_smiles
from .report import BenchReport

SYSTEMS = ("tree", "linear")
CSV_FIELDS = ("query", "system", "time", "candidates", "answers", "truncated", "finished", "compared")


class BenchError(ValueError):
    pass


def linear_scan(f: Fingerprint, store) -> list[int]:
    """Full-enumeration baseline: every molecule id whose fingerprint contains ``f``."""
    return store.linear_scan(f)


@dataclass
class QueryRun:
    query: str
    system: str
    time: float | None
    candidates: int
    answers: int
    truncated: bool
    compared: int

    @property
    def finished(self) -> bool:
        return self.time is not None


@dataclass
class BenchResult:
    report: BenchReport
    runs: list[QueryRun]
    skipped: list[tuple[str, str]]

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.runs:
            w.writerow([
                r.query,
                r.system,
                "" if r.time is None else f"{r.time:.6g}",
                r.candidates,
                r.answers,
                int(r.truncated),
                int(r.finished),
                r.compared,
            ])
        return buf.getvalue()

    def mean_compared(self, system: str) -> float:
        vals = [r.compared for r in self.runs if r.system == system]
        return sum(vals) / len(vals) if vals else 0.0


def _check_systems(systems: Sequence[str]) -> list[str]:
    systems = list(systems)
    if not systems:
        raise BenchError("no systems selected")
    for s in systems:
        if s not in SYSTEMS:
            raise BenchError(f"unknown system {s!r}; choose from {', '.join(SYSTEMS)}")
    return systems


def read_queries(path: str | Path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        queries = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not queries:
        raise BenchError(f"{path}: no queries")
    return queries


def run_benchmark(
    queries: Sequence[str],
    index,
    budget: float = 60.0,
    systems: Sequence[str] = SYSTEMS,
    limit: int | None = 10_000,
    clock: Callable[[], float] = time.perf_counter,
) -> BenchResult:
    """Time each SMILES query end to end on each system.

    Unparseable queries are skipped and listed in ``skipped``. A query that
    exceeds ``budget`` seconds is stopped and recorded as unfinished.
    """
    systems = _check_systems(systems)
    if not queries:
        raise BenchError("empty query set")
    parsed = []
    skipped = []
    for smi in queries:
        try:
            parsed.append((smi, parse_smiles(smi)))
        except SmilesError as exc:
            skipped.append((smi, str(exc)))
    if not parsed:
        raise BenchError("no parseable queries")

    runs: list[QueryRun] = []
    times: dict[str, list[float | None]] = {s: [] for s in systems}
    for system in systems:
        for smi, q in parsed:
            t0 = clock()
            res = find_meta_structures(
                q, index, limit, method=system, deadline=t0 + budget, clock=clock
            )
            elapsed = clock() - t0
            finished = not res.stats.timed_out and elapsed <= budget
            t = elapsed if finished else None
            times[system].append(t)
            runs.append(QueryRun(
                smi, system, t, res.stats.candidates, res.stats.answers,
                res.stats.truncated, res.stats.filter.fingerprints_compared,
            ))
    return BenchResult(BenchReport.from_times(times, budget), runs, skipped)


def run_filter_benchmark(
    queries: Sequence[Fingerprint],
    index,
    budget: float = 60.0,
    systems: Sequence[str] = SYSTEMS,
    repeat: int = 1,
    clock: Callable[[], float] = time.perf_counter,
) -> BenchResult:
    """Time only the fingerprint-screening stage (no verification).

    With ``repeat > 1`` each query's time is the minimum over repeats.
    """
    systems = _check_systems(systems)
    if not queries:
        raise BenchError("empty query set")
    store, tree = index
    runs: list[QueryRun] = []
    times: dict[str, list[float | None]] = {s: [] for s in systems}
    for system in systems:
        for k, f in enumerate(queries):
            best = None
            for _ in range(repeat):
                t0 = clock()
                if system == "tree":
                    found = tree.find_in_subtree(f)
                    ids = [m for fid in found.ids for m in store.molecules_for(fid)]
                    compared = found.stats.fingerprints_compared
                else:
                    ids = linear_scan(f, store)
                    compared = len(store)
                elapsed = clock() - t0
                best = elapsed if best is None else min(best, elapsed)
            t = best if best <= budget else None
            times[system].append(t)
            runs.append(QueryRun(f"q{k}", system, t, len(ids), len(ids), False, compared))
    return BenchResult(BenchReport.from_times(times, budget), runs, [])
