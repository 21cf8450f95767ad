"""Nearest-inlier distances, microcluster and per-point scores, and the full pipeline."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detect import (MicroclusterSet, OutlierPartition, code_length, code_length_array,
                     compute_cutoff, gel_microclusters, histogram_1nn, spot_outliers)
from .errors import ConfigurationError, DegenerateDatasetError
from .index import DEFAULT_LEAF_SIZE, MetricTree, build_index, count_cross_join, estimate_diameter
from .metric import DatasetHandle
from .oracle import (NeighborProfile, OraclePlot, RadiiSchedule, build_oracle_plot,
                     neighbor_profiles, radii_schedule)

DEFAULT_A = 15
DEFAULT_B = 0.1
DEFAULT_C_FRACTION = 0.1


def nearest_inlier_distances(data: DatasetHandle, outliers, schedule: RadiiSchedule,
                             plot: OraclePlot, leaf_size: int = DEFAULT_LEAF_SIZE) -> np.ndarray:
    """Grid-bucketed distance from every element to its nearest inlier.

    An outlier first touching an inlier at ``r_e`` gets ``r_(e-1)`` (0 for
    e = 1). Inliers get their 1NN Distance.
    """
    outliers = np.unique(np.asarray(outliers, dtype=np.int64))
    is_inlier = np.ones(data.n, dtype=bool)
    is_inlier[outliers] = False
    inliers = np.flatnonzero(is_inlier)
    if inliers.size == 0:
        raise DegenerateDatasetError("every element was flagged as an outlier; no inlier to score against")
    dni = plot.x.astype(np.float64).copy()
    pending = outliers
    if pending.size:
        tree = build_index(data, inliers, leaf_size)
        for e in range(1, schedule.a):
            hit = count_cross_join(pending, tree, schedule.r(e)) > 0
            dni[pending[hit]] = schedule.r(e - 1)
            pending = pending[~hit]
            if not pending.size:
                break
        # r_a is at least the diameter, so an inlier is always within it
        dni[pending] = schedule.r(schedule.a - 1)
    return dni


def score_microcluster(size: int, n: int, bridge: float, mean_1nn: float, t: float, r1: float) -> float:
    """Bits per member to describe a microcluster relative to its nearest inlier."""
    cardinality = code_length(size)
    nearest = code_length(n)
    bridge_bits = t * code_length(bridge / r1)
    spread_bits = t * code_length(1 + math.ceil(mean_1nn / r1))
    return (cardinality + nearest + bridge_bits + (size - 1) * spread_bits) / size


def score_points(dni, r1: float) -> np.ndarray:
    return code_length_array(1.0 + np.ceil(np.asarray(dni, dtype=np.float64) / r1))


@dataclass(frozen=True, eq=False)
class ScoredMicrocluster:
    members: np.ndarray
    nonsingleton: bool
    bridge_length: float
    mean_1nn: float
    score: float

    @property
    def cardinality(self) -> int:
        return int(self.members.shape[0])


def score_microclusters(mcs: MicroclusterSet, dni, plot: OraclePlot, n: int, t: float,
                        r1: float) -> list[ScoredMicrocluster]:
    """Score each microcluster and rank by score, descending; ties go to the smallest member id."""
    scored = []
    for mc in mcs:
        g = float(dni[mc.members].min())
        xbar = float(plot.x[mc.members].mean())
        s = score_microcluster(len(mc), n, g, xbar, t, r1)
        scored.append(ScoredMicrocluster(mc.members, mc.nonsingleton, g, xbar, s))
    scored.sort(key=lambda m: (-m.score, int(m.members[0])))
    return scored


@dataclass(eq=False)
class McCatchResult:
    microclusters: list[ScoredMicrocluster]
    point_scores: np.ndarray
    schedule: RadiiSchedule
    profile: NeighborProfile
    plot: OraclePlot
    histogram: np.ndarray
    partition: OutlierPartition
    nearest_inlier: np.ndarray
    a: int
    b: float
    c: int
    t: float

    @property
    def cutoff(self) -> float:
        return self.partition.cutoff

    @property
    def scores(self) -> list[float]:
        return [m.score for m in self.microclusters]

    def rank_of_point(self) -> np.ndarray:
        """1-based rank of the microcluster holding each element, -1 for inliers."""
        ranks = np.full(self.point_scores.shape[0], -1, dtype=np.int64)
        for k, mc in enumerate(self.microclusters, 1):
            ranks[mc.members] = k
        return ranks


def resolve_c(n: int, c: int | None = None, c_fraction: float = DEFAULT_C_FRACTION) -> int:
    if c is not None:
        return int(c)
    if not 0 < c_fraction <= 1:
        raise ConfigurationError(f"microcluster cardinality fraction must be in (0, 1], got {c_fraction}")
    return max(1, math.ceil(round(n * c_fraction, 9)))


def check_config(a: int, b: float, c: int) -> None:
    if int(a) != a or a < 2:
        raise ConfigurationError(f"number of radii must be an integer >= 2, got {a}")
    if not b >= 0:
        raise ConfigurationError(f"maximum plateau slope must be >= 0, got {b}")
    if c < 1:
        raise ConfigurationError(f"maximum microcluster cardinality must be >= 1, got {c}")


def run_mccatch(data: DatasetHandle, a: int = DEFAULT_A, b: float = DEFAULT_B, c: int | None = None,
                c_fraction: float = DEFAULT_C_FRACTION, leaf_size: int = DEFAULT_LEAF_SIZE,
                tree: MetricTree | None = None) -> McCatchResult:
    """Detect and rank microclusters; also score every element.

    Defaults follow the method's hands-off setting: 15 radii, slope 0.1 and a
    microcluster cap of ceil(0.1 n).
    """
    n = data.n
    if n < 2:
        raise DegenerateDatasetError(f"need at least two elements, got {n}")
    c = resolve_c(n, c, c_fraction)
    check_config(a, b, c)
    t = data.transformation_cost()
    if tree is None:
        tree = build_index(data, leaf_size=leaf_size)
    schedule = radii_schedule(estimate_diameter(tree), a)
    profile = neighbor_profiles(tree, schedule, c)
    plot = build_oracle_plot(profile, schedule, b, c)
    hist = histogram_1nn(plot, schedule)
    partition = spot_outliers(plot, compute_cutoff(hist, schedule))
    mcs = gel_microclusters(partition, plot, schedule, data, leaf_size)
    dni = nearest_inlier_distances(data, partition.outliers, schedule, plot, leaf_size)
    ranked = score_microclusters(mcs, dni, plot, n, t, schedule.r1)
    return McCatchResult(
        microclusters=ranked, point_scores=score_points(dni, schedule.r1), schedule=schedule,
        profile=profile, plot=plot, histogram=hist, partition=partition, nearest_inlier=dni,
        a=int(a), b=float(b), c=c, t=t,
    )
