"""Ranking metrics, the axiom win-rate harness, the scaling benchmark and a brute-force reference.

The reference pipeline computes the full distance matrix and reuses only the
pure pieces (plateau finder, cutoff, scoring formulas); neighbor counts,
gelation edges and nearest-inlier distances come straight from the matrix.
"""
from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist
from scipy.stats import rankdata

from .detect import MicroclusterSet, Microcluster, compute_cutoff, gelation_radius, histogram_1nn, spot_outliers
from .errors import ConfigurationError, ContractViolation, DegenerateDatasetError, McCatchError
from .index import build_index, estimate_diameter
from .metric import DatasetHandle, levenshtein
from .oracle import NeighborProfile, OraclePlot, find_plateaus, radii_schedule
from .score import (DEFAULT_A, DEFAULT_B, DEFAULT_C_FRACTION, McCatchResult, check_config, resolve_c,
                    run_mccatch, score_microclusters, score_points)
from .synth import AxiomScenario, CloudSpec, generate_axiom_scenario, generate_cloud

BRUTE_FORCE_CAP = 5000
WIN_OVERLAP = 0.8


class UndefinedMetricError(McCatchError, ValueError):
    exit_code = 2


# ---------------------------------------------------------------- metrics

def _check_labels(scores, labels):
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels).astype(bool)
    if s.shape != y.shape or s.ndim != 1:
        raise ContractViolation("scores and labels must be 1-d arrays of equal length")
    if y.all() or not y.any():
        raise UndefinedMetricError("metric needs at least one outlier and one inlier")
    return s, y


def auroc(scores, labels) -> float:
    """Probability a random outlier outscores a random inlier; ties count one half."""
    s, y = _check_labels(scores, labels)
    ranks = rankdata(s)
    pos, neg = int(y.sum()), int((~y).sum())
    u = ranks[y].sum() - pos * (pos + 1) / 2.0
    return float(u / (pos * neg))


def _threshold_curve(s, y):
    """Cumulative true/false positives at each distinct score, highest first."""
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    last = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    tp = np.cumsum(y)[last]
    fp = (last + 1) - tp
    return tp.astype(np.float64), fp.astype(np.float64)


def average_precision(scores, labels) -> float:
    """Sum over distinct thresholds of (recall step) x precision; tied scores share a threshold."""
    s, y = _check_labels(scores, labels)
    tp, fp = _threshold_curve(s, y)
    recall = tp / y.sum()
    precision = tp / (tp + fp)
    return float(np.sum(np.diff(np.r_[0.0, recall]) * precision))


def max_f1(scores, labels) -> float:
    s, y = _check_labels(scores, labels)
    tp, fp = _threshold_curve(s, y)
    fn = y.sum() - tp
    return float(np.max(2 * tp / (2 * tp + fp + fn)))


# ---------------------------------------------------------------- axioms

def jaccard(a, b) -> float:
    a, b = set(int(i) for i in a), set(int(i) for i in b)
    return len(a & b) / len(a | b) if a | b else 1.0


@dataclass
class AxiomTrial:
    axiom: str
    shape: str
    seed: int
    red_overlap: float
    green_overlap: float
    red_score: float
    green_score: float
    win: bool


def _best_match(result: McCatchResult, members):
    best, overlap = None, 0.0
    for mc in result.microclusters:
        j = jaccard(mc.members, members)
        if j > overlap:
            best, overlap = mc, j
    return best, overlap


def axiom_trial(scenario: AxiomScenario) -> AxiomTrial:
    data, labels = generate_axiom_scenario(scenario)
    result = run_mccatch(data)
    red, jr = _best_match(result, np.flatnonzero(labels == 1))
    green, jg = _best_match(result, np.flatnonzero(labels == 2))
    sr = red.score if red is not None else math.nan
    sg = green.score if green is not None else math.nan
    win = jr >= WIN_OVERLAP and jg >= WIN_OVERLAP and red is not green and sg > sr
    return AxiomTrial(scenario.axiom, scenario.shape, scenario.seed, jr, jg, sr, sg, bool(win))


def axiom_trials(axiom: str, shape: str, trials: int, seed: int = 0,
                 n_inliers: int = 10_000) -> list[AxiomTrial]:
    if trials < 1:
        raise ConfigurationError("need at least one trial")
    return [axiom_trial(AxiomScenario.default(axiom, shape, seed + k, n_inliers)) for k in range(trials)]


def axiom_win_rate(axiom: str, shape: str, trials: int, seed: int = 0) -> float:
    """Fraction of scenarios where both planted microclusters are found and green outscores red."""
    runs = axiom_trials(axiom, shape, trials, seed)
    return sum(t.win for t in runs) / len(runs)


def write_axiom_tsv(rows: list[AxiomTrial], path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("axiom\tshape\tseed\tred_overlap\tgreen_overlap\tred_score\tgreen_score\twin\n")
        for t in rows:
            fh.write(f"{t.axiom}\t{t.shape}\t{t.seed}\t{t.red_overlap:.17g}\t{t.green_overlap:.17g}"
                     f"\t{t.red_score:.17g}\t{t.green_score:.17g}\t{int(t.win)}\n")


# ---------------------------------------------------------------- scaling

@dataclass
class ScalingReport:
    kind: str
    dim: int
    sizes: list[int]
    seconds: list[float]
    slope: float
    expected: float

    def to_tsv(self, path) -> None:
        with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# kind={self.kind} dim={self.dim} slope={self.slope:.6g} expected={self.expected:.6g}\n")
            fh.write("n\tseconds\n")
            for n, sec in zip(self.sizes, self.seconds):
                fh.write(f"{n}\t{sec:.6g}\n")


def expected_exponent(kind: str, dim: int) -> float:
    u = 1.0 if kind == "diagonal" else float(dim)
    return 2.0 - 1.0 / u


def scaling_exponent(kind: str, dim: int, sizes, seed: int = 0, repeats: int = 3) -> ScalingReport:
    """Median wall time of ``run_mccatch`` per size and the log-log least-squares slope."""
    sizes = [int(s) for s in sizes]
    if len(sizes) < 4 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ConfigurationError("need at least 4 strictly increasing sizes")
    run_mccatch(generate_cloud(CloudSpec(kind, dim, min(sizes[0], 2000), seed)))  # compile and warm caches
    seconds = []
    for n in sizes:
        data = generate_cloud(CloudSpec(kind, dim, n, seed))
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            run_mccatch(data)
            times.append(time.perf_counter() - t0)
        seconds.append(statistics.median(times))
    slope = float(np.polyfit(np.log(sizes), np.log(seconds), 1)[0])
    return ScalingReport(kind, dim, sizes, seconds, slope, expected_exponent(kind, dim))


# ---------------------------------------------------------------- brute force

@dataclass(eq=False)
class ReferenceResult:
    profile: NeighborProfile
    plot: OraclePlot
    cutoff: float
    microclusters: list = field(default_factory=list)
    scores: list = field(default_factory=list)
    point_scores: np.ndarray | None = None


def distance_matrix(data: DatasetHandle) -> np.ndarray:
    spec = data.metric
    if spec.kind == "lp":
        X = data.vectors
        if math.isinf(spec.p):
            return cdist(X, X, "chebyshev")
        return cdist(X, X, "minkowski", p=spec.p)
    n = data.n
    D = np.zeros((n, n))
    f = levenshtein if spec.kind == "edit" else spec.func
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = float(f(data.element(i), data.element(j)))
    return D


def brute_force_reference(data: DatasetHandle, a: int = DEFAULT_A, b: float = DEFAULT_B, c: int | None = None,
                          c_fraction: float = DEFAULT_C_FRACTION) -> ReferenceResult:
    """The whole pipeline from an explicit n x n distance matrix; refuses n > 5000."""
    n = data.n
    if n > BRUTE_FORCE_CAP:
        raise ConfigurationError(f"brute-force reference is capped at {BRUTE_FORCE_CAP} elements, got {n}")
    c = resolve_c(n, c, c_fraction)
    check_config(a, b, c)
    D = distance_matrix(data)
    # the radii ladder depends only on the diameter estimate, shared with the indexed path
    schedule = radii_schedule(estimate_diameter(build_index(data)), a)
    radii = schedule.radii

    counts = np.zeros((n, a), dtype=np.int64)
    for i in range(n):
        for e in range(a):
            if e > 0 and counts[i, e - 1] > c:
                break
            counts[i, e] = n if e == a - 1 else int(np.count_nonzero(D[i] <= radii[e]))
    profile = NeighborProfile(counts=counts, c=c)

    x = np.zeros(n)
    y = np.zeros(n)
    first_end = np.zeros(n, dtype=np.int64)
    mid_s = np.zeros(n, dtype=np.int64)
    mid_e = np.zeros(n, dtype=np.int64)
    for i in range(n):
        best = -1.0
        for p in find_plateaus(counts[i], schedule, b, c):
            if p.height == 1:
                first_end[i] = p.end
                x[i] = radii[p.end - 1] - radii[0]
            elif p.end != a and p.length > best:
                best = p.length
                mid_s[i], mid_e[i], y[i] = p.start, p.end, p.length
    plot = OraclePlot(x=x, y=y, first_end=first_end, middle_start=mid_s, middle_end=mid_e)

    d = compute_cutoff(histogram_1nn(plot, schedule), schedule)
    partition = spot_outliers(plot, d)
    clusters = []
    M = partition.grouped
    if M.size:
        radius = gelation_radius(plot, M, schedule)
        sub = D[np.ix_(M, M)] <= radius
        I, J = np.nonzero(np.triu(sub, 1))
        graph = coo_matrix((np.ones(I.size), (I, J)), shape=(M.size, M.size))
        _, comp = connected_components(graph, directed=False)
        groups = [M[comp == k] for k in np.unique(comp)]
        clusters = [Microcluster(np.sort(g), g.size > 1) for g in sorted(groups, key=lambda g: g.min())]
    singles = np.setdiff1d(partition.outliers, M)
    clusters += [Microcluster(np.array([i], dtype=np.int64), False) for i in singles]
    mcs = MicroclusterSet(clusters)

    dni = x.copy()
    outliers = partition.outliers
    inliers = np.setdiff1d(np.arange(n), outliers)
    if inliers.size == 0:
        raise DegenerateDatasetError("every element was flagged as an outlier; no inlier to score against")
    if outliers.size:
        nearest = D[np.ix_(outliers, inliers)].min(axis=1)
        for k, i in enumerate(outliers):
            hits = [e for e in range(1, a) if nearest[k] <= radii[e - 1]]
            dni[i] = schedule.r(hits[0] - 1) if hits else schedule.r(a - 1)
    t = data.transformation_cost()
    ranked = score_microclusters(mcs, dni, plot, n, t, schedule.r1)
    return ReferenceResult(profile=profile, plot=plot, cutoff=d, microclusters=ranked,
                           scores=[m.score for m in ranked], point_scores=score_points(dni, schedule.r1))


def compare_to_reference(result: McCatchResult, ref: ReferenceResult, tol: float = 1e-9) -> list[str]:
    """Names of the products where the indexed run and the reference disagree."""
    bad = []
    if not np.array_equal(result.profile.counts, ref.profile.counts):
        bad.append("counts")
    if not np.array_equal(result.plot.x, ref.plot.x):
        bad.append("x")
    if not np.array_equal(result.plot.y, ref.plot.y):
        bad.append("y")
    if result.cutoff != ref.cutoff:
        bad.append("cutoff")
    ours = [tuple(int(i) for i in m.members) for m in result.microclusters]
    theirs = [tuple(int(i) for i in m.members) for m in ref.microclusters]
    if ours != theirs:
        bad.append("microclusters")
    elif not np.allclose(result.scores, ref.scores, rtol=0, atol=tol):
        bad.append("scores")
    if not np.allclose(result.point_scores, ref.point_scores, rtol=0, atol=tol):
        bad.append("point_scores")
    return bad
