from .harness import (
    BenchError,
    BenchResult,
    QueryRun,
    linear_scan,
    read_queries,
    run_benchmark,
    run_filter_benchmark,
)
from .report import PERCENTILES, BenchReport, SystemTimes, nearest_rank

__all__ = [
    "BenchError",
    "BenchReport",
    "BenchResult",
    "PERCENTILES",
    "QueryRun",
    "SystemTimes",
    "linear_scan",
    "nearest_rank",
    "read_queries",
    "run_benchmark",
    "run_filter_benchmark",
]
