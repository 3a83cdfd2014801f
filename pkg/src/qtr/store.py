"""Dataset ingestion, the fingerprint <-> molecule mapping, and index files.

Dataset files are UTF-8 text, one ``<id>\\t<smiles>`` record per line; blank
lines and lines starting with ``#`` are skipped.

Index file layout (all integers little-endian)::

    header (52 bytes)
      magic            4s   b"QTRI"
      version          u32  1
      fl               u32
      depth            u32
      record_count     u64
      max_path_len     u32  (0xFFFFFFFF: no fingerprint config)
      bits_per_feature u32
      hash_seed        u64
      fingerprint_count u64
      body_crc32       u32
    body
      fingerprints     fingerprint_count rows of 8*ceil(fl/64) bytes
                       (bit 0 = most significant bit of the first byte)
      records          record_count x (mol_id u64, fingerprint index u64,
                       smiles length u32, smiles UTF-8 bytes)
      tree             2**depth - 1 nodes in preorder; each is
                       kind u8 (0 internal, 1 leaf), centroid row,
                       and for leaves: member count u32 + members u64
"""

from __future__ import annotations

import struct
import zlib
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .balltree import BallTree, BuildError
from .bitfp import Fingerprint, FingerprintError, as_words, pack, submask_rows, unpack_row, words_for
from .fingerprinter import FpConfig, fingerprint
from .molgraph import MolGraph, SmilesError, parse_smiles

MAGIC = b"QTRI"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sIIIQIIQQI")
NO_CONFIG = 0xFFFFFFFF


class IngestError(ValueError):
    pass


class IndexFormatError(ValueError):
    pass


@dataclass
class IngestFailure:
    line: int
    message: str


class FingerprintStore:
    """Records ``(mol_id, smiles, fingerprint)`` plus the distinct-fingerprint table.

    Fingerprint ids index ``matrix`` (one row per distinct fingerprint, in
    order of first appearance); :meth:`molecules_for` is the inverse mapping
    from a fingerprint id to every molecule id carrying it.
    """

    def __init__(
        self,
        mol_ids: Sequence[int],
        smiles: Sequence[str],
        fp_of_record: np.ndarray,
        matrix: np.ndarray,
        fl: int,
        cfg: FpConfig | None = None,
        failures: list[IngestFailure] | None = None,
    ) -> None:
        self.mol_ids = list(mol_ids)
        self.smiles = list(smiles)
        self.fp_of_record = np.asarray(fp_of_record, dtype=np.int64)
        self.matrix = matrix
        self.fl = fl
        self.cfg = cfg
        self.failures = failures or []
        if not (len(self.mol_ids) == len(self.smiles) == len(self.fp_of_record)):
            raise IngestError("record columns have different lengths")
        self.record_of_id: dict[int, int] = {}
        for rec, mol_id in enumerate(self.mol_ids):
            if mol_id in self.record_of_id:
                raise IngestError(f"duplicate molecule id {mol_id}")
            self.record_of_id[mol_id] = rec
        inverse: list[list[int]] = [[] for _ in range(matrix.shape[0])]
        for mol_id, fid in zip(self.mol_ids, self.fp_of_record.tolist()):
            inverse[fid].append(mol_id)
        self._inverse = inverse
        self._graphs: dict[int, MolGraph] = {}
        self._record_words: np.ndarray | None = None

    # construction

    @classmethod
    def from_fingerprints(
        cls,
        fps: Sequence[Fingerprint],
        mol_ids: Sequence[int] | None = None,
        smiles: Sequence[str] | None = None,
        cfg: FpConfig | None = None,
    ) -> FingerprintStore:
        if not fps:
            raise IngestError("no fingerprints")
        fl = fps[0].fl
        return cls.from_matrix(pack(fps, fl), fl, mol_ids, smiles, cfg)

    @classmethod
    def from_matrix(
        cls,
        rows: np.ndarray,
        fl: int,
        mol_ids: Sequence[int] | None = None,
        smiles: Sequence[str] | None = None,
        cfg: FpConfig | None = None,
        failures: list[IngestFailure] | None = None,
    ) -> FingerprintStore:
        """Store over packed per-record rows; identical rows share one fingerprint id."""
        n = rows.shape[0]
        mol_ids = list(range(n)) if mol_ids is None else list(mol_ids)
        smiles = [""] * n if smiles is None else list(smiles)
        first: dict[bytes, int] = {}
        fp_of_record = np.empty(n, dtype=np.int64)
        keep = []
        for rec in range(n):
            key = rows[rec].tobytes()
            fid = first.get(key)
            if fid is None:
                fid = first[key] = len(keep)
                keep.append(rec)
            fp_of_record[rec] = fid
        matrix = np.ascontiguousarray(rows[keep])
        return cls(mol_ids, smiles, fp_of_record, matrix, fl, cfg, failures)

    @classmethod
    def from_smiles(
        cls,
        records: Iterable[tuple[int, str]],
        cfg: FpConfig = FpConfig(),
    ) -> FingerprintStore:
        mol_ids, smiles, fps = [], [], []
        for mol_id, smi in records:
            mol_ids.append(mol_id)
            smiles.append(smi)
            fps.append(fingerprint(parse_smiles(smi), cfg))
        if not fps:
            raise IngestError("no records")
        return cls.from_matrix(pack(fps, cfg.fl), cfg.fl, mol_ids, smiles, cfg)

    # accessors

    def __len__(self) -> int:
        return len(self.mol_ids)

    @property
    def num_fingerprints(self) -> int:
        return self.matrix.shape[0]

    def fingerprint(self, fid: int) -> Fingerprint:
        return unpack_row(self.matrix[fid], self.fl)

    def fp(self, mol_id: int) -> Fingerprint:
        """Fingerprint of molecule ``mol_id``."""
        return self.fingerprint(int(self.fp_of_record[self.record_of_id[mol_id]]))

    def molecules_for(self, fid: int) -> list[int]:
        """Every molecule id whose fingerprint is fingerprint ``fid``."""
        return self._inverse[fid]

    def lookup(self, f: Fingerprint) -> list[int]:
        """Molecule ids with exactly fingerprint ``f``."""
        if f.fl != self.fl:
            raise FingerprintError(f"query has fl={f.fl}, store has fl={self.fl}")
        hits = np.flatnonzero((self.matrix == f.to_array()).all(axis=1))
        return self._inverse[int(hits[0])] if len(hits) else []

    def molecule(self, mol_id: int) -> MolGraph:
        g = self._graphs.get(mol_id)
        if g is None:
            g = self._graphs[mol_id] = parse_smiles(self.smiles[self.record_of_id[mol_id]])
        return g

    @property
    def record_words(self) -> np.ndarray:
        """Per-record fingerprint rows as uint64 words (for linear scans)."""
        if self._record_words is None:
            self._record_words = as_words(self.matrix[self.fp_of_record])
        return self._record_words

    def linear_scan(self, f: Fingerprint) -> list[int]:
        """Molecule ids whose fingerprint is a superset of ``f``, in id order."""
        if f.fl != self.fl:
            raise FingerprintError(f"query has fl={f.fl}, store has fl={self.fl}")
        hits = np.flatnonzero(submask_rows(as_words(f.to_array()), self.record_words))
        return sorted(self.mol_ids[i] for i in hits.tolist())


def _parse_line(raw: str, line_no: int) -> tuple[int, str]:
    parts = raw.split("\t")
    if len(parts) != 2:
        raise ValueError("expected <id><TAB><smiles>")
    id_text, smi = parts[0].strip(), parts[1].strip()
    if not id_text.isdigit():
        raise ValueError(f"bad molecule id {id_text!r}")
    return int(id_text), smi


def ingest(path: str | Path, cfg: FpConfig = FpConfig()) -> FingerprintStore:
    """Read a dataset file. Malformed lines are skipped and listed in ``store.failures``."""
    mol_ids: list[int] = []
    smiles: list[str] = []
    fps: list[Fingerprint] = []
    failures: list[IngestFailure] = []
    seen: dict[int, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            raw = raw.rstrip("\r\n")
            if not raw.strip() or raw.startswith("#"):
                continue
            try:
                mol_id, smi = _parse_line(raw, line_no)
                g = parse_smiles(smi)
            except (ValueError, SmilesError) as exc:
                failures.append(IngestFailure(line_no, str(exc)))
                continue
            if mol_id in seen:
                raise IngestError(
                    f"line {line_no}: duplicate molecule id {mol_id} (first seen on line {seen[mol_id]})"
                )
            seen[mol_id] = line_no
            mol_ids.append(mol_id)
            smiles.append(smi)
            fps.append(fingerprint(g, cfg))
    if not fps:
        raise IngestError(f"{path}: no valid records")
    store = FingerprintStore.from_matrix(pack(fps, cfg.fl), cfg.fl, mol_ids, smiles, cfg, failures)
    return store


@dataclass
class Index:
    store: FingerprintStore
    tree: BallTree
    path: Path | None = field(default=None)

    def __iter__(self):
        # allows ``store, tree = index``
        return iter((self.store, self.tree))


# persistence


def _header_bytes(store: FingerprintStore, tree: BallTree, crc: int) -> bytes:
    cfg = store.cfg
    return HEADER.pack(
        MAGIC,
        FORMAT_VERSION,
        store.fl,
        tree.depth,
        len(store),
        NO_CONFIG if cfg is None else cfg.max_path_len,
        0 if cfg is None else cfg.bits_per_feature,
        0 if cfg is None else cfg.hash_seed,
        store.num_fingerprints,
        crc,
    )


def _body_bytes(store: FingerprintStore, tree: BallTree) -> bytes:
    out = bytearray(store.matrix.tobytes())
    for mol_id, fid, smi in zip(store.mol_ids, store.fp_of_record.tolist(), store.smiles):
        data = smi.encode("utf-8")
        out += struct.pack("<QQI", mol_id, fid, len(data))
        out += data
    leaf_base = tree.num_leaves - 1
    stack = [0]
    while stack:
        index = stack.pop()
        if index >= leaf_base:
            leaf = index - leaf_base
            lo, hi = tree.leaf_offsets[leaf], tree.leaf_offsets[leaf + 1]
            out += b"\x01" + tree.centroids[index].tobytes()
            out += struct.pack("<I", hi - lo)
            out += tree.members[lo:hi].astype("<u8").tobytes()
        else:
            out += b"\x00" + tree.centroids[index].tobytes()
            stack.append(2 * index + 2)
            stack.append(2 * index + 1)
    return bytes(out)


def save_index(store: FingerprintStore, tree: BallTree, path: str | Path) -> None:
    if tree.fl != store.fl:
        raise BuildError("tree and store disagree on fl")
    body = _body_bytes(store, tree)
    header = _header_bytes(store, tree, zlib.crc32(body))
    Path(path).write_bytes(header + body)


class _Reader:
    def __init__(self, data: bytes, offset: int) -> None:
        self.data = data
        self.pos = offset

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise IndexFormatError("truncated index file")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        s = struct.calcsize(fmt)
        return struct.unpack(fmt, self.take(s))


def load_index(path: str | Path) -> Index:
    """Read an index written by :func:`save_index`.

    Raises :class:`IndexFormatError` on bad magic, unknown version,
    truncation or checksum mismatch.
    """
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise IndexFormatError("truncated index header")
    (magic, version, fl, depth, n_records, max_path_len, bits_per_feature,
     hash_seed, n_fps, crc) = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise IndexFormatError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise IndexFormatError(f"unsupported format version {version}")
    if fl == 0 or depth == 0 or depth > 40:
        raise IndexFormatError("corrupt header")
    if zlib.crc32(data[HEADER.size :]) != crc:
        raise IndexFormatError("body checksum mismatch")

    cfg = None
    if max_path_len != NO_CONFIG:
        try:
            cfg = FpConfig(fl, max_path_len, bits_per_feature, hash_seed)
        except ValueError as exc:
            raise IndexFormatError(f"bad fingerprint config: {exc}") from None

    nbytes = 8 * words_for(fl)
    r = _Reader(data, HEADER.size)
    matrix = np.frombuffer(r.take(n_fps * nbytes), dtype=np.uint8).reshape(n_fps, nbytes).copy()
    mol_ids, smiles = [], []
    fp_of_record = np.empty(n_records, dtype=np.int64)
    for rec in range(n_records):
        mol_id, fid, length = r.unpack("<QQI")
        if fid >= n_fps:
            raise IndexFormatError("record refers to a missing fingerprint")
        mol_ids.append(mol_id)
        fp_of_record[rec] = fid
        smiles.append(r.take(length).decode("utf-8"))

    n_nodes = (1 << depth) - 1
    leaf_base = (1 << (depth - 1)) - 1
    centroids = np.zeros((n_nodes, nbytes), dtype=np.uint8)
    leaf_sets: list[np.ndarray] = [None] * (1 << (depth - 1))
    stack = [0]
    while stack:
        index = stack.pop()
        (kind,) = r.unpack("<B")
        centroids[index] = np.frombuffer(r.take(nbytes), dtype=np.uint8)
        if kind == 1:
            if index < leaf_base:
                raise IndexFormatError("leaf above the last level")
            (count,) = r.unpack("<I")
            leaf_sets[index - leaf_base] = np.frombuffer(r.take(8 * count), dtype="<u8").astype(np.int64)
        elif kind == 0:
            if index >= leaf_base:
                raise IndexFormatError("internal node on the leaf level")
            stack.append(2 * index + 2)
            stack.append(2 * index + 1)
        else:
            raise IndexFormatError(f"bad node kind {kind}")
    if r.pos != len(data):
        raise IndexFormatError("trailing bytes after tree")

    members = np.concatenate(leaf_sets)
    if len(members) and (members.max() >= n_fps or len(np.unique(members)) != len(members)):
        raise IndexFormatError("leaf membership is not a set of fingerprint ids")
    offsets = np.concatenate([[0], np.cumsum([len(s) for s in leaf_sets])]).astype(np.int64)
    try:
        store = FingerprintStore(mol_ids, smiles, fp_of_record, matrix, fl, cfg)
    except IngestError as exc:
        raise IndexFormatError(str(exc)) from None
    tree = BallTree(fl, depth, centroids, members, offsets, matrix)
    return Index(store, tree, Path(path))
