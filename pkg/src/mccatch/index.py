"""Pivot/covering-radius metric tree with count-only range joins.

The tree is binary. Each node covers a contiguous slice ``perm[start:end]``
of element ids and stores a pivot (one of those elements) plus a covering
radius. Construction is deterministic: a node's members are split around the
farthest pair found by two sweeps, ties going to the lower id, and the pivot
is the member minimizing its larger distance to that pair.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _npkernels
from ._backend import numba_enabled
from .errors import ContractViolation, DegenerateDatasetError, InputError
from .metric import DatasetHandle

DEFAULT_LEAF_SIZE = 32
# relative slack on prune/include decisions so rounding never changes a count
TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MetricTree:
    data: DatasetHandle
    ids: np.ndarray
    pivot: np.ndarray
    radius: np.ndarray
    start: np.ndarray
    end: np.ndarray
    left: np.ndarray
    right: np.ndarray
    perm: np.ndarray
    depth: int
    leaf_size: int

    @property
    def size(self) -> int:
        return int(self.ids.shape[0])

    @property
    def n_nodes(self) -> int:
        return int(self.pivot.shape[0])

    def is_leaf(self, node: int) -> bool:
        return self.left[node] < 0

    def members(self, node: int) -> np.ndarray:
        return self.perm[self.start[node]:self.end[node]]

    def same_structure(self, other: "MetricTree") -> bool:
        names = ("ids", "pivot", "radius", "start", "end", "left", "right", "perm")
        return all(np.array_equal(getattr(self, k), getattr(other, k)) for k in names)


def build_index(data: DatasetHandle, ids=None, leaf_size: int = DEFAULT_LEAF_SIZE) -> MetricTree:
    """Build a tree over ``ids`` (default: every element of ``data``)."""
    if leaf_size < 1:
        raise ContractViolation("leaf_size must be positive")
    ids = np.arange(data.n, dtype=np.int64) if ids is None else np.unique(np.asarray(ids, dtype=np.int64))
    if ids.size == 0:
        raise InputError("cannot index an empty dataset")
    perm = ids.copy()
    pivot, radius, start, end, left, right = [], [], [], [], [], []

    def new_node(s, e):
        for col, v in ((pivot, -1), (radius, 0.0), (start, s), (end, e), (left, -1), (right, -1)):
            col.append(v)
        return len(pivot) - 1

    stack = [(new_node(0, perm.size), 0)]
    depth = 0
    while stack:
        node, level = stack.pop()
        depth = max(depth, level)
        s, e = start[node], end[node]
        members = perm[s:e]
        if members.size == 1:
            pivot[node] = int(members[0])
            continue
        db = data.dist_many(int(members[0]), members)
        b = int(members[np.argmax(db)])
        db = data.dist_many(b, members)
        c = int(members[np.argmax(db)])
        dc = data.dist_many(c, members)
        p = int(members[np.argmin(np.maximum(db, dc))])
        pivot[node] = p
        radius[node] = float(data.dist_many(p, members).max())
        if members.size <= leaf_size or db.max() == 0.0:
            continue
        near_b = db <= dc
        lo, hi = members[near_b], members[~near_b]
        perm[s:e] = np.concatenate([lo, hi])
        mid = s + lo.size
        left[node] = new_node(s, mid)
        right[node] = new_node(mid, e)
        stack.append((right[node], level + 1))
        stack.append((left[node], level + 1))

    as_int = lambda v: np.asarray(v, dtype=np.int64)
    return MetricTree(
        data=data, ids=ids, pivot=as_int(pivot), radius=np.asarray(radius, dtype=np.float64),
        start=as_int(start), end=as_int(end), left=as_int(left), right=as_int(right),
        perm=perm, depth=depth, leaf_size=leaf_size,
    )


def estimate_diameter(tree: MetricTree) -> float:
    """Upper estimate of the largest pairwise distance among the tree's members.

    Internal root: the largest of ``d(pivot_i, pivot_j) + cr_i + cr_j`` over
    pairs of root children and ``2 * cr_i`` over single children. Leaf root:
    the exact maximum pairwise distance in the bucket.
    """
    if tree.size < 2:
        raise DegenerateDatasetError("need at least two elements to estimate a diameter")
    data = tree.data
    if tree.is_leaf(0):
        m = tree.members(0)
        I, J = np.triu_indices(m.size, k=1)
        l = float(data.dist_pairs(m[I], m[J]).max())
    else:
        kids = [int(tree.left[0]), int(tree.right[0])]
        l = max(2.0 * tree.radius[k] for k in kids)
        for x in range(len(kids)):
            for y in range(x + 1, len(kids)):
                a, b = kids[x], kids[y]
                d = data.dist(int(tree.pivot[a]), int(tree.pivot[b]))
                l = max(l, d + tree.radius[a] + tree.radius[b])
    if not l > 0:
        raise DegenerateDatasetError("all elements coincide; the diameter is zero")
    return float(l)


def _use_compiled(data: DatasetHandle) -> bool:
    return numba_enabled() and data.kind != "external"


def _tree_args(tree: MetricTree):
    return (tree.pivot, tree.radius, tree.left, tree.right, tree.start, tree.end,
            tree.perm, tree.depth)


def range_counts(tree: MetricTree, queries, radius: float) -> np.ndarray:
    """For each query id, the number of tree members within ``radius`` (inclusive)."""
    if not radius > 0:
        raise ContractViolation("radius must be positive")
    queries = np.ascontiguousarray(queries, dtype=np.int64)
    if _use_compiled(tree.data):
        from ._kernels import count_within

        X, S = tree.data.kernel_arrays()
        out = np.zeros(queries.shape[0], dtype=np.int64)
        count_within(X, S, float(tree.data.metric.p), *_tree_args(tree), queries,
                     float(radius), TOL, out)
        return out
    return _npkernels.count_within(tree.data, tree, queries, float(radius), TOL)


def count_self_join(tree: MetricTree, radius: float, active=None) -> np.ndarray:
    """Neighbor counts (self included) of ``active`` members, default all, in that order."""
    queries = tree.ids if active is None else np.asarray(active, dtype=np.int64)
    return range_counts(tree, queries, radius)


def count_cross_join(queries, targets: MetricTree, radius: float) -> np.ndarray:
    """Counts of ``targets`` members within ``radius`` of each query.

    ``queries`` is a :class:`MetricTree` (its sorted ids are used) or an id array.
    """
    if isinstance(queries, MetricTree):
        if queries.data is not targets.data:
            raise ContractViolation("cross join needs both trees over the same dataset")
        queries = queries.ids
    return range_counts(targets, queries, radius)


def pair_self_join(tree: MetricTree, radius: float) -> np.ndarray:
    """Every unordered pair ``(i, j)``, ``i < j``, with ``d(i, j) <= radius``, sorted."""
    if not radius > 0:
        raise ContractViolation("radius must be positive")
    if _use_compiled(tree.data):
        from ._kernels import pairs_within

        X, S = tree.data.kernel_arrays()
        I, J = pairs_within(X, S, float(tree.data.metric.p), *_tree_args(tree),
                            float(radius), TOL)
    else:
        I, J = _npkernels.pairs_within(tree.data, tree, float(radius), TOL)
    edges = np.stack([I, J], axis=1).astype(np.int64) if I.size else np.empty((0, 2), dtype=np.int64)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return edges[order]
