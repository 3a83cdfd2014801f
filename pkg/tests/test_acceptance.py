"""Acceptance criteria. Each test records PASS/FAIL under its criterion number."""

import random
import time
import zlib

import numpy as np
import pytest

from oracles import embeds_exhaustive, or_of, split_literal
from qtr.balltree import build_tree, split_fingerprints
from qtr.bench import PERCENTILES, BenchReport, nearest_rank, run_benchmark, run_filter_benchmark
from qtr.bench.synthetic import (
    cluster_queries,
    clustered_store,
    largest_component,
    random_fragment,
    random_molecule,
    uniform_store,
)
from qtr.bitfp import Fingerprint, is_submask
from qtr.engine import brute_force, find_meta_structures
from qtr.fingerprinter import FpConfig, fingerprint
from qtr.molgraph import parse_smiles, sub_structure, write_smiles
from qtr.store import FingerprintStore, load_index, save_index

pytestmark = pytest.mark.acceptance

CURATED = [
    "C", "O", "[Na+]", "[O-]C=O", "C#N", "c1ccccc1", "c1ccncc1", "c1ccsc1",
    "C1CC1", "C1CCCCC1", "CC(C)(C)C", "C=CC=C", "CC(=O)O", "[NH4+]",
    "c1ccc2ccccc2c1", "C1CC2CCC1C2", "CCO.CCN", "O=C=O", "[Cl-].[Na+]",
    "OCC(O)CO", "C%10CCCC%10", "N#CC#N", "c1cc[nH]c1", "CS(=O)(=O)O",
    "FC(F)(F)Cl", "Brc1ccccc1Br", "P(O)(O)O", "C[N+](C)(C)C",
]


def timed(c, limit, start):
    elapsed = time.perf_counter() - start
    c.detail += f"{elapsed:.1f}s"
    assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"


def test_1_filter_oracle_equivalence(criterion):
    with criterion("1 filter oracle equivalence") as c:
        start = time.perf_counter()
        rng = random.Random(101)
        sizes = [50_000, 20_000, 5_000, 1_000, 300] * 4
        mismatches = 0
        for k, n in enumerate(sizes):
            density = 0.02 + 0.18 * k / (len(sizes) - 1)
            store = uniform_store(n, 512, density, seed=1000 + k)
            tree = build_tree(None, store)
            for j in range(200):
                if j % 2:
                    # random bits from a stored fingerprint: never empty
                    bits = store.fingerprint(rng.randrange(store.num_fingerprints)).indices()
                    q = Fingerprint.from_indices(rng.sample(bits, min(len(bits), rng.randint(1, 6))), 512)
                else:
                    q = Fingerprint.from_indices(rng.sample(range(512), rng.randint(0, 3)), 512)
                found = tree.find_in_subtree(q)
                via_tree = sorted(m for fid in found.ids for m in store.molecules_for(fid))
                if via_tree != store.linear_scan(q):
                    mismatches += 1
        c.detail = f"4000 queries, {mismatches} mismatches, "
        assert mismatches == 0
        timed(c, 120, start)


def _corpus(n, seed):
    rng = random.Random(seed)
    rows = [(i, s) for i, s in enumerate(CURATED)]
    while len(rows) < n:
        rows.append((len(rows), write_smiles(random_molecule(rng, rng.randint(2, 20)))))
    return rows


def test_2_end_to_end_ground_truth(criterion):
    with criterion("2 end-to-end ground truth") as c:
        start = time.perf_counter()
        rows = _corpus(500, 202)
        store = FingerprintStore.from_smiles(rows, FpConfig())
        index = (store, build_tree(None, store))
        rng = random.Random(203)
        bad = 0
        for _ in range(100):
            parent = store.molecule(rng.choice(store.mol_ids))
            q = write_smiles(largest_component(random_fragment(parent, rng, rng.randint(0, 6))))
            got = find_meta_structures(q, index, limit=None).ids
            if sorted(got) != brute_force(q, store):
                bad += 1
        c.detail = f"100 queries, {bad} mismatches, "
        assert bad == 0
        timed(c, 120, start)


def test_3_monotonicity(criterion):
    with criterion("3 fingerprint monotonicity") as c:
        start = time.perf_counter()
        rng = random.Random(303)
        cfg = FpConfig()
        failures = 0
        for _ in range(1000):
            parent = random_molecule(rng, rng.randint(1, 24))
            frag = random_fragment(parent, rng, rng.randint(1, 8))
            if not is_submask(fingerprint(frag, cfg), fingerprint(parent, cfg)):
                failures += 1
        c.detail = f"1000 pairs, {failures} violations, "
        assert failures == 0
        timed(c, 30, start)


def _check_tree(tree, fps, n, d):
    leaves = list(tree.root.leaves())
    assert len(leaves) == 2 ** (d - 1)
    assert all(leaf.level == d - 1 for leaf in leaves)
    sizes = [len(leaf.members) for leaf in leaves]
    assert max(sizes) - min(sizes) <= 1
    members = sorted(m for leaf in leaves for m in leaf.members)
    assert members == list(range(n))
    for leaf in leaves:
        assert list(leaf.members) == sorted(leaf.members)

    def walk(node):
        if node.is_leaf:
            expected = or_of([fps[m] for m in node.members], tree.fl)
        else:
            expected = or_of([walk(node.left), walk(node.right)], tree.fl)
        assert node.centroid == expected
        return expected

    walk(tree.root)


def test_4_tree_invariants(criterion):
    with criterion("4 tree invariants") as c:
        start = time.perf_counter()
        rng = random.Random(404)
        for k in range(50):
            n = rng.randint(1, 3000)
            d = rng.randint(1, max(1, n.bit_length()))
            fl = rng.choice([64, 128, 256])
            store = uniform_store(n, fl, rng.uniform(0.02, 0.3), seed=k)
            # the store dedups; index by fingerprint id
            fps = [store.fingerprint(i) for i in range(store.num_fingerprints)]
            n_fp = len(fps)
            d = min(d, n_fp.bit_length())
            tree = build_tree(None, store, d)
            assert tree.depth == d
            _check_tree(tree, fps, n_fp, d)
        c.detail = "50 builds, "
        timed(c, 30, start)


def test_5_split_conformance(criterion):
    with criterion("5 split conformance") as c:
        start = time.perf_counter()
        rng = random.Random(505)
        for _ in range(1000):
            fl = rng.choice([2, 3, 5, 8, 16])
            n_total = rng.randint(2, 40)
            density = rng.random()
            fps = [
                Fingerprint.from_indices([i for i in range(fl) if rng.random() < density], fl)
                for _ in range(n_total)
            ]
            ids = rng.sample(range(n_total), rng.randint(2, n_total))
            got = split_fingerprints(ids, fps)
            left, right = split_literal(ids, fps)
            assert list(got.left_ids) == left
            assert list(got.right_ids) == right
            assert len(left) == len(ids) // 2
        c.detail = "1000 inputs, "
        timed(c, 10, start)


def _matcher_pool():
    rng = random.Random(606)
    fixed = ["C", "CC", "CO", "C=O", "CCC", "C1CC1", "c1ccccc1", "C1CCCCC1", "CC(C)C", "[O-]C", "C#N", "OCCO"]
    pool = [parse_smiles(s) for s in fixed]
    while len(pool) < 40:
        g = random_molecule(rng, rng.randint(1, 8))
        if rng.random() < 0.5:
            g = largest_component(random_fragment(g, rng, rng.randint(1, 3)))
        pool.append(g)
    assert all(g.num_atoms <= 8 for g in pool)
    return pool


def test_6_matcher_oracle(criterion):
    with criterion("6 matcher oracle") as c:
        start = time.perf_counter()
        pool = _matcher_pool()
        disagreements = 0
        positives = 0
        for q in pool:
            for t in pool:
                truth = embeds_exhaustive(q, t)
                positives += truth
                if sub_structure(q, t) != truth:
                    disagreements += 1
        c.detail = f"1600 pairs, {positives} embeddings, {disagreements} disagreements, "
        assert disagreements == 0
        timed(c, 60, start)


def test_7_pruning_effectiveness(criterion):
    with criterion("7 pruning effectiveness") as c:
        start = time.perf_counter()
        store = clustered_store(100_000, 512, clusters=2, signature_bits=8, seed=707)
        tree = build_tree(None, store)
        queries = cluster_queries(store, 200, seed=708)
        result = run_filter_benchmark(queries, (store, tree), repeat=5)
        ratio = result.mean_compared("tree") / result.mean_compared("linear")
        rows = result.report.rows()
        slower = [label for label, (t_tree, t_lin) in rows[:-1] if t_tree > t_lin]
        c.detail = f"compared ratio {ratio:.3f}, rows where tree slower: {slower or 'none'}, "
        print()
        print(result.report.render())
        assert ratio <= 0.6
        assert not slower
        assert rows[-1][1] == [1.0, 1.0]
        timed(c, 180, start)


def _expected_header(store, tree, body):
    cfg = store.cfg
    return (
        b"QTRI"
        + (1).to_bytes(4, "little")
        + store.fl.to_bytes(4, "little")
        + tree.depth.to_bytes(4, "little")
        + len(store).to_bytes(8, "little")
        + cfg.max_path_len.to_bytes(4, "little")
        + cfg.bits_per_feature.to_bytes(4, "little")
        + cfg.hash_seed.to_bytes(8, "little")
        + store.num_fingerprints.to_bytes(8, "little")
        + zlib.crc32(body).to_bytes(4, "little")
    )


def test_8_persistence_round_trip(criterion, tmp_path):
    with criterion("8 persistence round-trip") as c:
        start = time.perf_counter()
        rows = _corpus(1000, 808)
        cfg = FpConfig(fl=1024)
        store = FingerprintStore.from_smiles(rows, cfg)
        tree = build_tree(None, store)
        path = tmp_path / "corpus.qtri"
        save_index(store, tree, path)
        raw = path.read_bytes()
        assert len(raw) > 52
        assert raw[:52] == _expected_header(store, tree, raw[52:])
        assert raw[:52].hex()[:8] == "51545249"  # "QTRI"
        loaded = load_index(path)
        rng = random.Random(809)
        for _ in range(100):
            parent = store.molecule(rng.choice(store.mol_ids))
            q = write_smiles(largest_component(random_fragment(parent, rng, rng.randint(0, 5))))
            a = find_meta_structures(q, (store, tree), limit=None)
            b = find_meta_structures(q, loaded, limit=None)
            assert a.ids == b.ids
            assert (a.stats.candidates, a.stats.filter) == (b.stats.candidates, b.stats.filter)
            f = fingerprint(parse_smiles(q), cfg)
            assert tree.find_in_subtree(f).ids == loaded.tree.find_in_subtree(f).ids
        assert np.array_equal(store.matrix, loaded.store.matrix)
        c.detail = "100 queries, "
        timed(c, 30, start)


# hand-computed nearest-rank values: rank = ceil(p * m / 100)
FIXTURES = [
    ([5.0, 1.0, 4.0, 2.0, 3.0], [1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0, 5.0, 5.0]),
    ([7.0], [7.0] * 10),
    ([float(v) for v in range(20, 0, -1)], [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 19.0]),
]


def test_9_benchmark_protocol(criterion):
    with criterion("9 benchmark protocol") as c:
        start = time.perf_counter()
        assert list(PERCENTILES) == [10, 20, 30, 40, 50, 60, 70, 80, 90, 95]
        for values, expected in FIXTURES:
            assert [nearest_rank(values, p) for p in PERCENTILES] == expected

        rows_in = [(i, s) for i, s in enumerate(CURATED)]
        store = FingerprintStore.from_smiles(rows_in, FpConfig(fl=256))
        index = (store, build_tree(None, store))
        result = run_benchmark(["C", "CO", "c1ccccc1", "N"], index)
        labels = [label for label, _ in result.report.rows()]
        assert labels == [f"{p}%" for p in PERCENTILES] + ["≤ 60 s:"]
        text = result.report.render().splitlines()
        body = [ln.split("|")[0].strip() for ln in text if "|" in ln and not ln.startswith("-")]
        assert body == ["%"] + [f"{p}%" for p in PERCENTILES] + ["≤ 60 s:"]
        assert BenchReport.from_times({"x": [1.0]}).rows()[-1][0] == "≤ 60 s:"
        c.detail = "3 fixtures, "
        timed(c, 5, start)
