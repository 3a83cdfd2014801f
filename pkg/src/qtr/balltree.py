"""Centroid-annotated complete binary tree over fingerprints.

Nodes live in heap order (root 0, children ``2i+1`` / ``2i+2``), so a tree of
depth ``d`` has ``2**d - 1`` nodes and ``2**(d-1)`` leaves, all on the last
level. Each node stores the bitwise OR of every fingerprint below it; a query
descends only into nodes whose centroid is a superset of the query.

Leaf members are laid out contiguously (leaf 0 first) together with a copy of
their fingerprint rows, so a query touches the tree one level at a time with
vectorized centroid tests and scans all surviving leaves in one pass.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .bitfp import (
    Fingerprint,
    FingerprintError,
    as_words,
    bit_columns,
    pack,
    submask_rows,
    unpack_row,
    words_for,
)

_COUNT_CHUNK = 8192
_MAX_SLICES = 16


class BuildError(ValueError):
    pass


def _source(fps) -> tuple[np.ndarray, int]:
    """Packed matrix and fl from a store or a plain sequence of fingerprints."""
    if hasattr(fps, "matrix") and hasattr(fps, "fl"):
        return fps.matrix, fps.fl
    fps = list(fps)
    if not fps:
        raise BuildError("no fingerprints")
    return pack(fps, fps[0].fl), fps[0].fl


def _column_counts(matrix: np.ndarray, ids: np.ndarray, fl: int) -> np.ndarray:
    counts = np.zeros(fl, dtype=np.int64)
    for start in range(0, len(ids), _COUNT_CHUNK):
        chunk = matrix[ids[start : start + _COUNT_CHUNK]]
        counts += bit_columns(chunk, fl).sum(axis=0, dtype=np.int64)
    return counts


def _split(matrix: np.ndarray, ids: np.ndarray, fl: int) -> tuple[np.ndarray, np.ndarray, int]:
    n = len(ids)
    counts = _column_counts(matrix, ids, fl)
    # argmin returns the first minimum: ties go to the lowest bit index
    bit = int(np.argmin(np.abs(n - 2 * counts)))
    right = ((matrix[ids, bit // 8] >> (7 - bit % 8)) & 1).astype(bool)
    n_left = n - int(right.sum())
    half_down, half_up = n // 2, n - n // 2
    if n_left > half_down:
        move = np.flatnonzero(~right)[-(n_left - half_down) :]
        right[move] = True
    elif n - n_left > half_up:
        move = np.flatnonzero(right)[-(n - n_left - half_up) :]
        right[move] = False
    return ids[~right], ids[right], bit


@dataclass(frozen=True)
class SplitResult:
    left_ids: list[int]
    right_ids: list[int]
    bit: int


def split_fingerprints(ids: Sequence[int], fps) -> SplitResult:
    """Split ``ids`` into halves of sizes ``floor(n/2)`` and ``ceil(n/2)``.

    The split bit is the one whose set-count is closest to ``n/2`` (lowest
    index on ties). Members without the bit go left, members with it go
    right; the oversized side then hands its last members (in input order)
    to the other side. Both sides keep input order.
    """
    if len(ids) < 2:
        raise BuildError(f"cannot split fewer than 2 fingerprints (got {len(ids)})")
    matrix, fl = _source(fps)
    left, right, bit = _split(matrix, np.asarray(ids, dtype=np.int64), fl)
    return SplitResult(left.tolist(), right.tolist(), bit)


def default_depth(n: int) -> int:
    """Depth targeting about 64 fingerprints per leaf, never forcing an empty leaf."""
    if n < 1:
        raise BuildError("cannot index an empty fingerprint set")
    d = max(1, math.floor(math.log2(n / 64)) + 1) if n >= 64 else 1
    while 2 ** (d - 1) > n:
        d -= 1
    return d


@dataclass(frozen=True)
class SearchStats:
    nodes_visited: int = 0
    leaves_scanned: int = 0
    fingerprints_compared: int = 0


@dataclass(frozen=True)
class SearchResult:
    ids: list[int]
    truncated: bool
    stats: SearchStats


class TreeNode:
    """Read-only view of one node of a :class:`BallTree`."""

    __slots__ = ("tree", "index")

    def __init__(self, tree: BallTree, index: int) -> None:
        self.tree = tree
        self.index = index

    @property
    def level(self) -> int:
        return (self.index + 1).bit_length() - 1

    @property
    def is_leaf(self) -> bool:
        return self.level == self.tree.depth - 1

    @property
    def centroid(self) -> Fingerprint:
        return unpack_row(self.tree.centroids[self.index], self.tree.fl)

    @property
    def left(self) -> TreeNode | None:
        return None if self.is_leaf else TreeNode(self.tree, 2 * self.index + 1)

    @property
    def right(self) -> TreeNode | None:
        return None if self.is_leaf else TreeNode(self.tree, 2 * self.index + 2)

    def leaf_range(self) -> tuple[int, int]:
        """Half-open range of leaf numbers below this node."""
        span = 1 << (self.tree.depth - 1 - self.level)
        first = (self.index + 1 - (1 << self.level)) * span
        return first, first + span

    def leaves(self) -> Iterator[TreeNode]:
        first, last = self.leaf_range()
        base = self.tree.num_leaves - 1
        for leaf in range(first, last):
            yield TreeNode(self.tree, base + leaf)

    @property
    def members(self) -> list[int]:
        """Fingerprint ids below this node, in leaf order."""
        first, last = self.leaf_range()
        off = self.tree.leaf_offsets
        return self.tree.members[off[first] : off[last]].tolist()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TreeNode) and other.tree is self.tree and other.index == self.index

    def __hash__(self) -> int:
        return hash((id(self.tree), self.index))

    def __repr__(self) -> str:
        kind = "leaf" if self.is_leaf else "node"
        return f"<TreeNode {kind} #{self.index} level={self.level}>"


class BallTree:
    """An immutable built tree. Use :func:`build_tree` to construct one."""

    def __init__(
        self,
        fl: int,
        depth: int,
        centroids: np.ndarray,
        members: np.ndarray,
        leaf_offsets: np.ndarray,
        matrix: np.ndarray,
    ) -> None:
        if centroids.shape[0] != (1 << depth) - 1:
            raise BuildError(f"depth {depth} needs {(1 << depth) - 1} centroids")
        if leaf_offsets.shape[0] != (1 << (depth - 1)) + 1:
            raise BuildError(f"depth {depth} needs {1 << (depth - 1)} leaves")
        self.fl = fl
        self.depth = depth
        self.centroids = centroids
        self.members = members
        self.leaf_offsets = leaf_offsets
        # fingerprint rows of ``members``, in the same order
        self.packed = np.ascontiguousarray(matrix[members]) if len(members) else matrix[:0]
        self._cwords = as_words(self.centroids)
        self._pwords = as_words(self.packed)

    @property
    def num_leaves(self) -> int:
        return 1 << (self.depth - 1)

    @property
    def num_nodes(self) -> int:
        return (1 << self.depth) - 1

    @property
    def root(self) -> TreeNode:
        return TreeNode(self, 0)

    def node(self, index: int) -> TreeNode:
        if not 0 <= index < self.num_nodes:
            raise IndexError(f"node index {index} out of range")
        return TreeNode(self, index)

    def _scan_leaves(self, q: np.ndarray, leaves: np.ndarray) -> list[int]:
        off = self.leaf_offsets
        runs = _runs(leaves)
        if len(runs) <= _MAX_SLICES:
            # contiguous leaf runs are scanned in place
            hits = []
            for first, last in runs:
                lo, hi = off[first], off[last]
                hits.append(lo + np.flatnonzero(submask_rows(q, self._pwords[lo:hi])))
            hit_rows = np.concatenate(hits)
        else:
            starts = off[leaves]
            lens = off[leaves + 1] - starts
            rows = np.arange(int(lens.sum()), dtype=np.int64) + np.repeat(
                starts - (np.cumsum(lens) - lens), lens
            )
            hit_rows = rows[submask_rows(q, self._pwords[rows])]
        return self.members[hit_rows].tolist()

    def leaf_sizes(self) -> np.ndarray:
        return np.diff(self.leaf_offsets)

    def find_in_subtree(
        self,
        f: Fingerprint,
        node: TreeNode | int | None = None,
        limit: int | None = None,
    ) -> SearchResult:
        """All fingerprint ids below ``node`` (default: root) that are supersets of ``f``.

        Subtrees whose centroid lacks a query bit are skipped. Results are in
        leaf order, left subtree first; ``limit`` truncates them and sets the
        ``truncated`` flag.
        """
        if f.fl != self.fl:
            raise FingerprintError(f"query has fl={f.fl}, index has fl={self.fl}")
        start = 0 if node is None else (node.index if isinstance(node, TreeNode) else int(node))
        if not 0 <= start < self.num_nodes:
            raise IndexError(f"node index {start} out of range")
        q = as_words(f.to_array())
        level = (start + 1).bit_length() - 1
        # one vectorized test over every centroid is cheaper than per-level calls
        ok = submask_rows(q, self._cwords)
        active = np.array([start], dtype=np.int64)
        passed = 0
        while True:
            active = active[ok[active]]
            passed += len(active)
            if not len(active) or level == self.depth - 1:
                break
            active = (2 * active[:, None] + np.array([1, 2])).ravel()
            level += 1
        # the starting node is always visited, even when it prunes immediately
        visited = passed if passed else 1
        if not len(active):
            return SearchResult([], False, SearchStats(visited, 0, 0))

        leaves = active - (self.num_leaves - 1)
        ids = self._scan_leaves(q, leaves)
        total = int((self.leaf_offsets[leaves + 1] - self.leaf_offsets[leaves]).sum())
        truncated = limit is not None and len(ids) > limit
        if truncated:
            ids = ids[:limit]
        return SearchResult(ids, truncated, SearchStats(visited, len(leaves), total))


def _runs(leaves: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of consecutive leaf numbers as half-open ranges."""
    breaks = np.flatnonzero(np.diff(leaves) != 1) + 1
    firsts = np.concatenate([[0], breaks])
    lasts = np.concatenate([breaks, [len(leaves)]])
    return [(int(leaves[a]), int(leaves[b - 1]) + 1) for a, b in zip(firsts, lasts)]


def build_tree(ids: Sequence[int] | None, fps, d: int | None = None) -> BallTree:
    """Build a complete tree of depth ``d`` over fingerprint ids ``ids``.

    ``fps`` is a :class:`~qtr.store.FingerprintStore` or a sequence of
    fingerprints indexed by id; ``ids=None`` means all of them. ``d=None``
    picks :func:`default_depth`.
    """
    matrix, fl = _source(fps)
    ids = np.arange(matrix.shape[0], dtype=np.int64) if ids is None else np.asarray(ids, dtype=np.int64)
    if d is None:
        d = default_depth(len(ids))
    if d < 1:
        raise BuildError(f"depth must be >= 1, got {d}")
    if len(ids) < 2 ** (d - 1):
        raise BuildError(
            f"depth {d} needs at least {2 ** (d - 1)} fingerprints for non-empty leaves, got {len(ids)}"
        )
    if len(ids) and (ids.min() < 0 or ids.max() >= matrix.shape[0]):
        raise BuildError("fingerprint id out of range")
    if len(np.unique(ids)) != len(ids):
        raise BuildError("duplicate fingerprint ids")

    nbytes = 8 * words_for(fl)
    centroids = np.zeros(((1 << d) - 1, nbytes), dtype=np.uint8)
    leaf_sets: list[np.ndarray] = [None] * (1 << (d - 1))
    first_leaf = (1 << (d - 1)) - 1

    def build(index: int, part: np.ndarray, depth: int) -> None:
        if depth == 1:
            leaf_sets[index - first_leaf] = np.sort(part)
            if len(part):
                centroids[index] = np.bitwise_or.reduce(matrix[part], axis=0)
            return
        left, right, _ = _split(matrix, part, fl)
        build(2 * index + 1, left, depth - 1)
        build(2 * index + 2, right, depth - 1)
        centroids[index] = centroids[2 * index + 1] | centroids[2 * index + 2]

    build(0, ids, d)
    sizes = np.array([len(s) for s in leaf_sets], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    members = np.concatenate(leaf_sets).astype(np.int64) if leaf_sets else np.zeros(0, np.int64)
    return BallTree(fl, d, centroids, members, offsets, matrix)


def find_in_subtree(
    v: TreeNode, f: Fingerprint, limit: int | None = None
) -> SearchResult:
    return v.tree.find_in_subtree(f, v, limit)
