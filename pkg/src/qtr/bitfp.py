"""Fixed-length binary fingerprints.

Bit ``i`` of a fingerprint of length ``fl`` is stored as bit ``fl - 1 - i`` of a
Python integer, so the big-endian byte/hex rendering of that integer reads
bit 0 first. The same layout is used for the packed numpy matrices
(``uint8`` rows, bit 0 = most significant bit of byte 0, rows padded with
zero bits to a whole number of 64-bit words).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np


class FingerprintError(ValueError):
    """Raised on length mismatches and out-of-range bit indices."""


def words_for(fl: int) -> int:
    return -(-fl // 64)


class Fingerprint:
    """Immutable bit string of constant length ``fl``."""

    __slots__ = ("_value", "_fl")

    def __init__(self, value: int, fl: int) -> None:
        if fl <= 0:
            raise FingerprintError(f"fingerprint length must be positive, got {fl}")
        if value < 0 or value >> fl:
            raise FingerprintError(f"value does not fit in {fl} bits")
        object.__setattr__(self, "_value", value)
        object.__setattr__(self, "_fl", fl)

    def __setattr__(self, name, value):
        raise AttributeError("Fingerprint is immutable")

    @property
    def value(self) -> int:
        return self._value

    @property
    def fl(self) -> int:
        return self._fl

    # constructors

    @classmethod
    def zeros(cls, fl: int) -> Fingerprint:
        return cls(0, fl)

    @classmethod
    def from_bits(cls, bits: str | Sequence[int]) -> Fingerprint:
        """Build from a ``"0101"`` string or a sequence of 0/1, bit 0 first."""
        if isinstance(bits, str):
            bits = [int(c) for c in bits if c not in " _"]
        if not bits:
            raise FingerprintError("empty bit string")
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise FingerprintError(f"bit values must be 0 or 1, got {b!r}")
            value = (value << 1) | b
        return cls(value, len(bits))

    @classmethod
    def from_indices(cls, indices: Iterable[int], fl: int) -> Fingerprint:
        value = 0
        for i in indices:
            if not 0 <= i < fl:
                raise FingerprintError(f"bit index {i} out of range for fl={fl}")
            value |= 1 << (fl - 1 - i)
        return cls(value, fl)

    @classmethod
    def from_hex(cls, text: str, fl: int | None = None) -> Fingerprint:
        fl = 4 * len(text) if fl is None else fl
        if fl % 4 or len(text) != fl // 4:
            raise FingerprintError(f"hex string of {len(text)} chars does not encode {fl} bits")
        return cls(int(text, 16), fl)

    @classmethod
    def from_bytes(cls, data: bytes, fl: int) -> Fingerprint:
        """Inverse of :meth:`to_bytes`."""
        nbytes = 8 * words_for(fl)
        if len(data) != nbytes:
            raise FingerprintError(f"expected {nbytes} bytes for fl={fl}, got {len(data)}")
        pad = 8 * nbytes - fl
        raw = int.from_bytes(data, "big")
        if raw & ((1 << pad) - 1):
            raise FingerprintError("padding bits are set")
        return cls(raw >> pad, fl)

    # encodings

    def to_hex(self) -> str:
        if self._fl % 4:
            raise FingerprintError(f"hex encoding needs fl divisible by 4, got {self._fl}")
        return format(self._value, f"0{self._fl // 4}x")

    def to_bits(self) -> str:
        return format(self._value, f"0{self._fl}b")

    def to_bytes(self) -> bytes:
        """Word-padded big-endian bytes: bit 0 is the MSB of byte 0."""
        nwords = words_for(self._fl)
        return (self._value << (64 * nwords - self._fl)).to_bytes(8 * nwords, "big")

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.to_bytes(), dtype=np.uint8)

    # queries

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self._fl:
            raise FingerprintError(f"bit index {i} out of range for fl={self._fl}")
        return (self._value >> (self._fl - 1 - i)) & 1

    def __len__(self) -> int:
        return self._fl

    def popcount(self) -> int:
        return self._value.bit_count()

    def indices(self) -> list[int]:
        return [i for i, c in enumerate(self.to_bits()) if c == "1"]

    def __or__(self, other: Fingerprint) -> Fingerprint:
        return bit_or(self, other)

    def __le__(self, other: Fingerprint) -> bool:
        return is_submask(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return self._fl == other._fl and self._value == other._value

    def __hash__(self) -> int:
        return hash((self._value, self._fl))

    def __repr__(self) -> str:
        body = self.to_bits() if self._fl <= 64 else f"popcount={self.popcount()}"
        return f"Fingerprint({body}, fl={self._fl})"


def _check(a: Fingerprint, b: Fingerprint) -> None:
    if a.fl != b.fl:
        raise FingerprintError(f"fingerprint length mismatch: {a.fl} != {b.fl}")


def is_submask(a: Fingerprint, b: Fingerprint) -> bool:
    """True iff every bit set in ``a`` is also set in ``b``."""
    _check(a, b)
    return a.value & ~b.value == 0


def bit_or(a: Fingerprint, b: Fingerprint) -> Fingerprint:
    _check(a, b)
    return Fingerprint(a.value | b.value, a.fl)


def or_all(fps: Iterable[Fingerprint], fl: int) -> Fingerprint:
    value = 0
    for f in fps:
        if f.fl != fl:
            raise FingerprintError(f"fingerprint length mismatch: {f.fl} != {fl}")
        value |= f.value
    return Fingerprint(value, fl)


def count_ones_at(fps: Sequence[Fingerprint], i: int, fl: int | None = None) -> int:
    """Number of fingerprints in ``fps`` with bit ``i`` set."""
    if fl is None:
        fl = fps[0].fl if fps else None
    if fl is not None and not 0 <= i < fl:
        raise FingerprintError(f"bit index {i} out of range for fl={fl}")
    if i < 0:
        raise FingerprintError(f"bit index {i} out of range")
    return sum(f[i] for f in fps)


# packed matrices


def pack(fps: Sequence[Fingerprint], fl: int) -> np.ndarray:
    """Stack fingerprints into an ``(n, 8 * words)`` uint8 matrix."""
    nbytes = 8 * words_for(fl)
    out = np.zeros((len(fps), nbytes), dtype=np.uint8)
    if fps:
        buf = bytearray()
        for f in fps:
            if f.fl != fl:
                raise FingerprintError(f"fingerprint length mismatch: {f.fl} != {fl}")
            buf += f.to_bytes()
        out[:] = np.frombuffer(bytes(buf), dtype=np.uint8).reshape(len(fps), nbytes)
    return out


def unpack_row(row: np.ndarray, fl: int) -> Fingerprint:
    return Fingerprint.from_bytes(row.tobytes(), fl)


def as_words(matrix: np.ndarray) -> np.ndarray:
    """View a packed uint8 matrix (or single row) as uint64 words."""
    return np.ascontiguousarray(matrix).view(np.uint64)


def submask_rows(query: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Boolean vector: which word rows are supersets of the word vector ``query``."""
    if rows.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    query = query.reshape(-1)
    nz = np.flatnonzero(query)
    if len(nz) == 0:
        return np.ones(rows.shape[0], dtype=bool)
    if len(nz) < len(query):
        # words where the query is zero cannot fail the test
        rows, query = rows[:, nz], query[nz]
    return ((rows & query) == query).all(axis=1)


def bit_columns(matrix: np.ndarray, fl: int) -> np.ndarray:
    """Unpack a packed matrix to an ``(n, fl)`` array of 0/1 bytes."""
    return np.unpackbits(matrix, axis=1, count=fl)
