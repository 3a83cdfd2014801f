from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

PERCENTILES = (10, 20, 30, 40, 50, 60, 70, 80, 90, 95)


def nearest_rank(values: Sequence[float], p: float) -> float:
    """Nearest-rank percentile: the ``ceil(p*m/100)``-th smallest of ``m`` values."""
    if not values:
        raise ValueError("percentile of an empty sample")
    if not 0 < p <= 100:
        raise ValueError(f"percentile must be in (0, 100], got {p}")
    ordered = sorted(values)
    rank = max(1, math.ceil(p * len(ordered) / 100))
    return ordered[rank - 1]


def _fmt_seconds(t: float) -> str:
    return "unfinished" if math.isinf(t) else f"{t:.6g}"


def _fmt_budget(budget: float) -> str:
    return f"{budget:g}"


@dataclass(frozen=True)
class SystemTimes:
    """Per-query wall times for one system; unfinished queries are ``None``."""

    name: str
    times: tuple[float | None, ...]

    def completion(self) -> float:
        if not self.times:
            return 0.0
        return sum(t is not None for t in self.times) / len(self.times)

    def percentile(self, p: float) -> float:
        # unfinished queries rank after every finished one
        return nearest_rank([math.inf if t is None else t for t in self.times], p)


@dataclass(frozen=True)
class BenchReport:
    systems: tuple[SystemTimes, ...]
    budget: float = 60.0
    percentiles: tuple[int, ...] = PERCENTILES

    @classmethod
    def from_times(
        cls, times: Mapping[str, Sequence[float | None]], budget: float = 60.0
    ) -> BenchReport:
        return cls(tuple(SystemTimes(k, tuple(v)) for k, v in times.items()), budget)

    def rows(self) -> list[tuple[str, list[float]]]:
        """``(label, per-system value)`` rows: percentiles, then the completion row."""
        out = [(f"{p}%", [s.percentile(p) for s in self.systems]) for p in self.percentiles]
        out.append((f"≤ {_fmt_budget(self.budget)} s:", [s.completion() for s in self.systems]))
        return out

    def render(self) -> str:
        """Aligned plain-text table; byte-stable for identical inputs."""
        header = ["%"] + [s.name for s in self.systems]
        body = []
        rows = self.rows()
        for label, values in rows[:-1]:
            body.append([label] + [_fmt_seconds(v) for v in values])
        label, fracs = rows[-1]
        footer = [label] + [f"{100 * v:.2f}%" for v in fracs]
        table = [header] + body + [footer]
        widths = [max(len(r[c]) for r in table) for c in range(len(header))]

        def line(cells: list[str]) -> str:
            return " | ".join(c.rjust(w) for c, w in zip(cells, widths)).rstrip()

        rule = "-+-".join("-" * w for w in widths)
        lines = [line(header), rule] + [line(r) for r in body] + [rule, line(footer)]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        header = ",".join(["row"] + [s.name for s in self.systems])
        lines = [header]
        rows = self.rows()
        for label, values in rows[:-1]:
            lines.append(",".join([label] + [_fmt_seconds(v) for v in values]))
        label, fracs = rows[-1]
        lines.append(",".join([f"<={_fmt_budget(self.budget)}s"] + [f"{v:.4f}" for v in fracs]))
        return "\n".join(lines) + "\n"
