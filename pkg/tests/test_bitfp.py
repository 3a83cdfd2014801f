import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import submask_by_popcount
from qtr.bitfp import (
    Fingerprint,
    FingerprintError,
    as_words,
    bit_or,
    count_ones_at,
    is_submask,
    pack,
    submask_rows,
    unpack_row,
)

F = Fingerprint.from_bits


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ("00000000", "10100000", True),
        ("10100000", "10100000", True),
        ("01000000", "10100000", False),
    ],
)
def test_is_submask_examples(a, b, expected):
    assert is_submask(F(a), F(b)) is expected


def test_bit_or_examples():
    assert bit_or(F("1000"), F("0011")) == F("1011")
    x = F("0110")
    assert bit_or(x, F("0000")) == x
    assert bit_or(x, x) == x


def test_count_ones_at():
    fps = [F("1000"), F("0011"), F("1010")]
    assert count_ones_at(fps, 0) == 2
    assert count_ones_at([], 5) == 0
    assert count_ones_at([F("1111")], 3) == 1


def test_count_ones_at_range():
    with pytest.raises(FingerprintError):
        count_ones_at([F("1111")], 4)
    with pytest.raises(FingerprintError):
        count_ones_at([F("1111")], -1)


def test_length_mismatch():
    with pytest.raises(FingerprintError):
        is_submask(F("10"), F("100"))
    with pytest.raises(FingerprintError):
        bit_or(F("10"), F("100"))


def test_immutable():
    f = F("1010")
    with pytest.raises(AttributeError):
        f._value = 0


def test_hex_bit_zero_is_msb():
    f = Fingerprint.from_indices([0], 8)
    assert f.to_hex() == "80"
    assert Fingerprint.from_hex("80") == f
    assert Fingerprint.from_indices([7, 8], 16).to_hex() == "0180"
    with pytest.raises(FingerprintError):
        Fingerprint.from_hex("abc", 16)


def test_bytes_are_word_padded():
    f = Fingerprint.from_indices([0, 69], 70)
    raw = f.to_bytes()
    assert len(raw) == 16
    assert raw[0] == 0x80 and raw[8] == 0x04
    assert Fingerprint.from_bytes(raw, 70) == f
    with pytest.raises(FingerprintError):
        Fingerprint.from_bytes(raw[:-1] + b"\x01", 70)


fl_strategy = st.sampled_from([1, 7, 64, 100, 512])


@st.composite
def triples(draw):
    fl = draw(fl_strategy)
    vals = [draw(st.integers(0, (1 << fl) - 1)) for _ in range(3)]
    return [Fingerprint(v, fl) for v in vals]


@given(triples())
def test_partial_order(t):
    a, b, c = t
    assert is_submask(a, a)
    if is_submask(a, b) and is_submask(b, a):
        assert a == b
    if is_submask(a, b) and is_submask(b, c):
        assert is_submask(a, c)
    # chain built by OR makes transitivity non-vacuous
    ab = bit_or(a, b)
    abc = bit_or(ab, c)
    assert is_submask(a, ab) and is_submask(ab, abc) and is_submask(a, abc)


@given(triples())
def test_or_compatibility_and_popcount_crosscheck(t):
    a, b, _ = t
    assert is_submask(a, bit_or(a, b))
    assert is_submask(a, b) == submask_by_popcount(a, b)
    assert is_submask(b, a) == submask_by_popcount(b, a)


@given(triples())
def test_packed_rows_agree_with_scalar(t):
    fl = t[0].fl
    rows = as_words(pack(t, fl))
    for q in t:
        got = submask_rows(as_words(q.to_array()), rows).tolist()
        assert got == [is_submask(q, x) for x in t]
    m = pack(t, fl)
    assert [unpack_row(m[i], fl) for i in range(3)] == t


def test_submask_rows_empty():
    assert submask_rows(np.zeros(1, np.uint64), np.zeros((0, 1), np.uint64)).shape == (0,)
