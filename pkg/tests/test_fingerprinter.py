import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtr.bench.synthetic import random_fragment, random_molecule
from qtr.bitfp import is_submask
from qtr.fingerprinter import FpConfig, fingerprint, path_features
from qtr.molgraph import parse_smiles, sub_structure

P = parse_smiles
SYM = {"single": "-", "double": "=", "triple": "#", "aromatic": ":"}


def features_by_enumeration(g, max_len):
    """Every atom sequence of distinct, consecutively bonded atoms, both directions."""
    labels = [a.label for a in g.atoms]
    out = set()
    for length in range(1, min(max_len + 1, g.num_atoms) + 1):
        for seq in itertools.permutations(range(g.num_atoms), length):
            orders = [g.bond_order(a, b) for a, b in zip(seq, seq[1:])]
            if None in orders:
                continue
            toks = [labels[seq[0]]]
            for o, a in zip(orders, seq[1:]):
                toks += [SYM[o], labels[a]]
            fwd, rev = "".join(toks), "".join(reversed(toks))
            out.add(min(fwd, rev))
    return out


def fnv_reference(feature, stream, seed):
    h = 0xCBF29CE484222325 ^ ((seed + stream * 0x9E3779B97F4A7C15) % 2**64)
    for byte in feature.encode():
        h = ((h ^ byte) * 0x100000001B3) % 2**64
    return h


def fingerprint_reference(g, cfg):
    bits = set()
    for feat in features_by_enumeration(g, cfg.max_path_len):
        for s in range(cfg.bits_per_feature):
            bits.add(fnv_reference(feat, s, cfg.hash_seed) % cfg.fl)
    return sorted(bits)


def test_single_atom_popcount():
    cfg = FpConfig()
    assert 1 <= fingerprint(P("C"), cfg).popcount() <= cfg.bits_per_feature
    assert path_features(P("C"), 5) == {"C"}


def test_carbon_in_ethane():
    assert is_submask(fingerprint(P("C")), fingerprint(P("CC")))
    assert path_features(P("C"), 5) <= path_features(P("CC"), 5)


def test_notation_invariance():
    assert path_features(P("CCO"), 5) == path_features(P("OCC"), 5) == {"C", "O", "C-C", "C-O", "C-C-O"}
    assert fingerprint(P("CCO")) == fingerprint(P("OCC"))


@pytest.mark.parametrize(
    "a, b",
    [
        ("OC(=O)c1ccccc1", "c1ccc(cc1)C(O)=O"),
        ("C1CC1N", "NC1CC1"),
        ("[O-]C(=O)CC", "CCC([O-])=O"),
    ],
)
def test_notation_variants(a, b):
    assert fingerprint(P(a)) == fingerprint(P(b))


def test_labels_in_features():
    feats = path_features(P("c1ccccc1[N+]"), 1)
    assert "C/a:C/a" in feats
    assert "C/a-N/+1" in feats


def test_path_features_match_enumeration():
    rng = random.Random(11)
    for _ in range(60):
        g = random_molecule(rng, rng.randint(1, 9))
        for max_len in (0, 1, 3, 5):
            assert path_features(g, max_len) == features_by_enumeration(g, max_len)


def test_hash_is_bit_exact():
    cfg = FpConfig(fl=256, max_path_len=3, bits_per_feature=3, hash_seed=12345)
    rng = random.Random(12)
    for _ in range(20):
        g = random_molecule(rng, rng.randint(1, 8))
        assert fingerprint(g, cfg).indices() == fingerprint_reference(g, cfg)


def test_config_validation():
    for bad in ({"fl": 100}, {"max_path_len": -1}, {"bits_per_feature": 0}, {"bits_per_feature": 5}):
        with pytest.raises(ValueError):
            FpConfig(**bad)


def test_monotone_under_deletion():
    rng = random.Random(13)
    cfg = FpConfig(fl=512)
    for _ in range(200):
        g = random_molecule(rng, rng.randint(2, 16))
        frag = random_fragment(g, rng, rng.randint(1, 4))
        assert is_submask(fingerprint(frag, cfg), fingerprint(g, cfg))


def test_monotone_on_small_matching_pairs():
    rng = random.Random(14)
    pool = [random_molecule(rng, rng.randint(1, 8)) for _ in range(40)]
    cfg = FpConfig(fl=256)
    fps = [fingerprint(g, cfg) for g in pool]
    hits = 0
    for i, q in enumerate(pool):
        for j, t in enumerate(pool):
            if sub_structure(q, t):
                hits += 1
                assert is_submask(fps[i], fps[j])
    assert hits > len(pool)


@settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(1, 20),
    k=st.integers(0, 6),
    max_path_len=st.integers(0, 6),
    bpf=st.integers(1, 4),
)
def test_monotone_under_any_config(seed, n, k, max_path_len, bpf):
    rng = random.Random(seed)
    cfg = FpConfig(fl=256, max_path_len=max_path_len, bits_per_feature=bpf, hash_seed=seed)
    parent = random_molecule(rng, n)
    frag = random_fragment(parent, rng, k)
    assert is_submask(fingerprint(frag, cfg), fingerprint(parent, cfg))
