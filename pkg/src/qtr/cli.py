"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 query parse error.
Results go to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from collections import Counter

from .balltree import BuildError, build_tree, default_depth
from .bench import BenchError, read_queries, run_benchmark
from .engine import QueryError, find_meta_structures
from .fingerprinter import FpConfig
from .store import IndexFormatError, IngestError, ingest, load_index, save_index

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_QUERY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _depth_arg(text: str):
    if text == "auto":
        return None
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"depth must be 'auto' or an integer, got {text!r}") from None
    if d < 1:
        raise argparse.ArgumentTypeError("depth must be >= 1")
    return d


def cmd_build(args) -> int:
    try:
        cfg = FpConfig(args.fl, args.max_path_len, args.bits_per_feature)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    t0 = time.perf_counter()
    store = ingest(args.input, cfg)
    for failure in store.failures:
        _err(f"{args.input}:{failure.line}: skipped: {failure.message}")
    depth = default_depth(store.num_fingerprints) if args.depth is None else args.depth
    try:
        tree = build_tree(None, store, depth)
    except BuildError as exc:
        raise UsageError(str(exc)) from None
    save_index(store, tree, args.output)
    elapsed = time.perf_counter() - t0
    print(f"records: {len(store)}")
    print(f"skipped: {len(store.failures)}")
    print(f"fingerprints: {store.num_fingerprints}")
    print(f"depth: {tree.depth}")
    print(f"build_seconds: {elapsed:.3f}")
    return EXIT_OK


def cmd_query(args) -> int:
    index = load_index(args.index)
    workers = (os.cpu_count() or 1) if args.parallel else None
    if args.smiles is not None:
        queries, batch = [args.smiles], False
    else:
        with open(args.file, encoding="utf-8") as fh:
            queries = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
        batch = True
    status = EXIT_OK
    for k, smi in enumerate(queries):
        try:
            res = find_meta_structures(smi, index, args.limit, workers=workers)
        except QueryError as exc:
            _err(f"error: {exc}")
            status = EXIT_QUERY
            continue
        if batch:
            if k:
                print()
            print(f"# {smi}")
        for mol_id in res.ids:
            print(mol_id)
        if args.stats:
            if batch:
                _err(f"# {smi}")
            for line in res.stats.lines():
                _err(line)
    return status


def cmd_bench(args) -> int:
    index = load_index(args.index)
    queries = read_queries(args.queries)
    systems = [s.strip() for s in args.systems.split(",") if s.strip()]
    try:
        result = run_benchmark(queries, index, args.budget, systems, args.limit)
    except BenchError as exc:
        raise UsageError(str(exc)) from None
    for smi, why in result.skipped:
        _err(f"skipped query {smi!r}: {why}")
    sys.stdout.write(result.report.render())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(result.csv_text())
    return EXIT_OK


def cmd_inspect(args) -> int:
    index = load_index(args.index)
    store, tree = index
    cfg = store.cfg
    print("format: QTRI v1")
    print(f"fl: {store.fl}")
    print(f"depth: {tree.depth}")
    print(f"records: {len(store)}")
    print(f"fingerprints: {store.num_fingerprints}")
    if cfg is not None:
        print(f"max_path_len: {cfg.max_path_len}")
        print(f"bits_per_feature: {cfg.bits_per_feature}")
        print(f"hash_seed: 0x{cfg.hash_seed:016x}")
    print("leaf sizes:")
    for size, count in sorted(Counter(tree.leaf_sizes().tolist()).items()):
        print(f"  {size}: {count}")
    print("centroid popcount per level (min/mean/max):")
    for level in range(tree.depth):
        lo, hi = (1 << level) - 1, (1 << (level + 1)) - 1
        pops = [tree.node(i).centroid.popcount() for i in range(lo, hi)]
        print(f"  {level}: {min(pops)}/{sum(pops) / len(pops):.1f}/{max(pops)}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qtr", description="Fingerprint-tree substructure search.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="ingest a dataset and write an index")
    b.add_argument("--input", required=True)
    b.add_argument("--output", required=True)
    b.add_argument("--fl", type=int, default=2048)
    b.add_argument("--depth", type=_depth_arg, default=None)
    b.add_argument("--max-path-len", type=int, default=5)
    b.add_argument("--bits-per-feature", type=int, default=2)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="find molecules containing a query structure")
    q.add_argument("--index", required=True)
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--smiles")
    src.add_argument("--file")
    q.add_argument("--limit", type=int, default=10_000)
    q.add_argument("--stats", action="store_true")
    q.add_argument("--parallel", action="store_true")
    q.set_defaults(func=cmd_query)

    be = sub.add_parser("bench", help="time tree vs linear search")
    be.add_argument("--index", required=True)
    be.add_argument("--queries", required=True)
    be.add_argument("--budget", type=float, default=60.0)
    be.add_argument("--systems", default="tree,linear")
    be.add_argument("--limit", type=int, default=10_000)
    be.add_argument("--csv")
    be.set_defaults(func=cmd_bench)

    i = sub.add_parser("inspect", help="describe an index file")
    i.add_argument("--index", required=True)
    i.set_defaults(func=cmd_inspect)
    return p


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE
    except (OSError, IndexFormatError, IngestError, BenchError, UnicodeDecodeError) as exc:
        _err(f"error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
