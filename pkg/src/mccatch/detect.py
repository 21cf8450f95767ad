"""Code lengths, MDL cutoff selection and gelation of outliers into microclusters."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractViolation, DegenerateDatasetError
from .index import DEFAULT_LEAF_SIZE, build_index, pair_self_join
from .metric import DatasetHandle
from .oracle import OraclePlot, RadiiSchedule


def code_length(z: float) -> float:
    """Universal code length: positive terms of log2(z) + log2(log2(z)) + ...

    Zero for ``z <= 1``.
    """
    total = 0.0
    term = math.log2(z) if z > 1 else 0.0
    while term > 0:
        total += term
        term = math.log2(term) if term > 1 else 0.0
    return total


def code_length_array(z) -> np.ndarray:
    """Elementwise :func:`code_length`."""
    z = np.asarray(z, dtype=np.float64)
    total = np.zeros_like(z)
    term = np.log2(np.where(z > 1, z, 1.0))
    while (term > 0).any():
        total += np.where(term > 0, term, 0.0)
        term = np.log2(np.where(term > 1, term, 1.0))
    return total


def _cost_terms(values) -> list[float]:
    v = [int(x) for x in values]
    if not v:
        raise ContractViolation("compression cost of an empty set")
    k, s = len(v), sum(v)
    ceil_div = lambda num, den: -(-num // den)
    terms = [code_length(k), code_length(1 + ceil_div(s, k))]
    terms += [code_length(1 + ceil_div(abs(x * k - s), k)) for x in v]
    return terms


def compression_cost(values) -> float:
    """Bits to store a set of counts as size, rounded mean, and deviations from the mean.

    Integer arithmetic keeps every ceiling exact; the correctly rounded sum
    makes the cost independent of term order.
    """
    return math.fsum(_cost_terms(values))


def histogram_1nn(plot: OraclePlot, schedule: RadiiSchedule) -> np.ndarray:
    """Bins ``h_0..h_a``; element i falls in bin ``grid_index(x_i)``."""
    return np.bincount(schedule.grid_index(plot.x), minlength=schedule.a + 1).astype(np.int64)


def write_histogram_tsv(hist, schedule: RadiiSchedule, path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin_index\tradius\tcount\n")
        for e, h in enumerate(hist):
            fh.write(f"{e}\t{schedule.r(e):.17g}\t{int(h)}\n")


def cutoff_position(hist) -> tuple[int, int]:
    """(mode bin, cut bin) for a histogram ``h_0..h_a``.

    Bin 0 is folded into bin 1. The cut ``e`` ranges over mode+1..a and
    minimizes the cost of {h_mode..h_(e-1)} plus {h_e..h_a}; ties keep the
    smaller ``e``. A mode at the top bin returns ``(a, a)``.
    """
    h = np.asarray(hist, dtype=np.int64)
    a = h.size - 1
    if a < 1 or h.sum() == 0:
        raise DegenerateDatasetError("histogram of 1NN distances is empty")
    bins = h[1:].copy()
    bins[0] += h[0]
    mode = int(np.argmax(bins)) + 1
    if mode == a:
        return mode, a
    best_e, best_cost = a, math.inf
    for e in range(mode + 1, a + 1):
        # one rounded sum over both halves, so exactly tied cuts stay tied
        cost = math.fsum(_cost_terms(bins[mode - 1:e - 1]) + _cost_terms(bins[e - 1:]))
        if cost < best_cost:
            best_e, best_cost = e, cost
    return mode, best_e


def compute_cutoff(hist, schedule: RadiiSchedule) -> float:
    _, e = cutoff_position(hist)
    return schedule.r(e)


@dataclass(eq=False)
class OutlierPartition:
    outliers: np.ndarray
    grouped: np.ndarray
    cutoff: float


def spot_outliers(plot: OraclePlot, d: float) -> OutlierPartition:
    """All outliers (x >= d or y >= d) and the subset with a large Group 1NN Distance."""
    outliers = np.flatnonzero((plot.x >= d) | (plot.y >= d))
    grouped = outliers[plot.y[outliers] >= d]
    return OutlierPartition(outliers=outliers, grouped=grouped, cutoff=float(d))


class UnionFind:
    """Disjoint sets over 0..n-1; the smaller root always wins a union."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            lo, hi = min(rx, ry), max(rx, ry)
            self.parent[hi] = lo


@dataclass(frozen=True, eq=False)
class Microcluster:
    members: np.ndarray
    nonsingleton: bool

    def __len__(self) -> int:
        return int(self.members.shape[0])


@dataclass(eq=False)
class MicroclusterSet:
    clusters: list[Microcluster]
    join_radius: float | None = None

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def as_sets(self) -> set[frozenset]:
        return {frozenset(int(i) for i in mc.members) for mc in self.clusters}


def gelation_radius(plot: OraclePlot, grouped, schedule: RadiiSchedule) -> float:
    """Join radius that reaches the nearest neighbor of every grouped outlier.

    A 1NN Distance ``x = r_e' - r_1`` means the count was still 1 at ``r_e'``,
    so the radius used is the next one up, ``r_(e'+1)``. Elements with
    ``x = 0`` already had company within ``r_1``. Clamped to ``r_a``.
    """
    x_up = float(plot.x[grouped].max())
    if x_up <= 0:
        return schedule.r(1)
    e = int(schedule.grid_index(x_up + schedule.r1))
    return schedule.r(min(e + 1, schedule.a))


def components(nodes, edges) -> list[np.ndarray]:
    """Connected components of the graph (nodes, edges), sorted by smallest member."""
    nodes = np.asarray(nodes, dtype=np.int64)
    slot = {int(v): k for k, v in enumerate(nodes)}
    uf = UnionFind(nodes.size)
    for i, j in edges:
        uf.union(slot[int(i)], slot[int(j)])
    groups: dict[int, list[int]] = {}
    for k, v in enumerate(nodes):
        groups.setdefault(uf.find(k), []).append(int(v))
    return sorted((np.array(sorted(g), dtype=np.int64) for g in groups.values()),
                  key=lambda g: g[0])


def gel_microclusters(partition: OutlierPartition, plot: OraclePlot, schedule: RadiiSchedule,
                      data: DatasetHandle, leaf_size: int = DEFAULT_LEAF_SIZE) -> MicroclusterSet:
    """Group outliers: components of the radius graph over the grouped set, singletons for the rest."""
    grouped = partition.grouped
    clusters = []
    radius = None
    if grouped.size:
        radius = gelation_radius(plot, grouped, schedule)
        tree = build_index(data, grouped, leaf_size)
        edges = pair_self_join(tree, radius)
        clusters = [Microcluster(g, g.size > 1) for g in components(grouped, edges)]
    in_group = np.isin(partition.outliers, grouped)
    for i in partition.outliers[~in_group]:
        clusters.append(Microcluster(np.array([i], dtype=np.int64), False))
    return MicroclusterSet(clusters=clusters, join_radius=radius)
