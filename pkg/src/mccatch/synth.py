"""Seeded generators for axiom scenarios and Uniform/Diagonal clouds.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``, so a seed
reproduces the same bytes on a given numpy release.

Geometry of the axiom scenarios, in units of the inlier width sigma = 1:

* ``gaussian``: isotropic normal blob at the origin. Red sits ``bridge`` to
  the left of the centre, green ``bridge`` below it.
* ``cross``: two bars of half-length 10, uniform along their axis and normal
  across it. Red sits ``bridge`` beyond the left tip, green beyond the bottom
  tip.
* ``arc``: 120-degree annulus of radius 15 spanning angles 180..300 degrees,
  normal across the arc. Red sits ``bridge`` outside the arc at 200 degrees,
  green at 270 degrees.

Planted microclusters share one offset template: the lattice points of pitch
``mc_spread`` nearest the anchor, taken by distance then angle. Every prefix
of that order is 4-connected, so each member sits exactly one pitch from
another and the cluster cannot fall apart into far sub-groups. Red and green
differ only in what the axiom varies.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .metric import DatasetHandle

SHAPES = ("gaussian", "cross", "arc")
AXIOMS = ("isolation", "cardinality")
# how far the inlier mass reaches from its skeleton; bridges must clear it
INLIER_EXTENT = 4.0
CROSS_HALF_LENGTH = 10.0
ARC_RADIUS = 15.0
ARC_SPAN = (180.0, 300.0)
RED_ANGLE, GREEN_ANGLE = 200.0, 270.0

LABEL_NAMES = ("inlier", "red", "green")


@dataclass(frozen=True)
class AxiomScenario:
    axiom: str = "isolation"
    shape: str = "gaussian"
    n_inliers: int = 10_000
    red_size: int = 5
    green_size: int = 5
    red_bridge: float = 6.0
    green_bridge: float = 12.0
    mc_spread: float = 0.05
    seed: int = 0

    @classmethod
    def default(cls, axiom: str, shape: str, seed: int = 0, n_inliers: int = 10_000) -> "AxiomScenario":
        if axiom == "cardinality":
            return cls(axiom, shape, n_inliers, red_size=20, green_size=5,
                       red_bridge=8.0, green_bridge=8.0, seed=seed)
        return cls(axiom, shape, n_inliers, seed=seed)

    def validate(self) -> None:
        if self.axiom not in AXIOMS:
            raise ConfigurationError(f"unknown axiom {self.axiom!r}")
        if self.shape not in SHAPES:
            raise ConfigurationError(f"unknown inlier shape {self.shape!r}")
        if self.n_inliers < 2:
            raise ConfigurationError("need at least two inliers")
        if min(self.red_size, self.green_size) < 1:
            raise ConfigurationError("planted microclusters need at least one member")
        if min(self.red_bridge, self.green_bridge) <= INLIER_EXTENT:
            raise ConfigurationError(
                f"bridge distances must exceed the inlier extent ({INLIER_EXTENT} sigma)")
        if self.mc_spread < 0:
            raise ConfigurationError("mc_spread must be nonnegative")
        if self.axiom == "isolation":
            if self.red_size != self.green_size or not self.green_bridge > self.red_bridge:
                raise ConfigurationError("isolation scenario: equal sizes and a longer green bridge required")
        else:
            if self.red_bridge != self.green_bridge or not self.green_size < self.red_size:
                raise ConfigurationError("cardinality scenario: equal bridges and a smaller green cluster required")


def _inliers(shape: str, n: int, rng: np.random.Generator) -> np.ndarray:
    if shape == "gaussian":
        return rng.standard_normal((n, 2))
    if shape == "cross":
        half = n // 2
        along = rng.uniform(-CROSS_HALF_LENGTH, CROSS_HALF_LENGTH, n)
        across = rng.standard_normal(n)
        pts = np.empty((n, 2))
        pts[:half, 0], pts[:half, 1] = along[:half], across[:half]
        pts[half:, 0], pts[half:, 1] = across[half:], along[half:]
        return pts
    theta = np.deg2rad(rng.uniform(*ARC_SPAN, n))
    rho = ARC_RADIUS + rng.standard_normal(n)
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])


def _anchor(shape: str, colour: str, bridge: float) -> np.ndarray:
    if shape == "gaussian":
        return np.array([-bridge, 0.0]) if colour == "red" else np.array([0.0, -bridge])
    if shape == "cross":
        tip = CROSS_HALF_LENGTH + bridge
        return np.array([-tip, 0.0]) if colour == "red" else np.array([0.0, -tip])
    angle = np.deg2rad(RED_ANGLE if colour == "red" else GREEN_ANGLE)
    rho = ARC_RADIUS + bridge
    return np.array([rho * np.cos(angle), rho * np.sin(angle)])


def lattice_template(k: int, pitch: float) -> np.ndarray:
    """The ``k`` points of the square lattice with spacing ``pitch`` closest to the origin."""
    side = int(np.ceil(np.sqrt(k))) + 1
    g = np.arange(-side, side + 1)
    P = np.array([(i, j) for i in g for j in g], dtype=np.float64)
    order = np.lexsort((np.arctan2(P[:, 1], P[:, 0]), np.hypot(P[:, 0], P[:, 1])))
    return P[order[:k]] * pitch


def generate_axiom_scenario(spec: AxiomScenario) -> tuple[DatasetHandle, np.ndarray]:
    """Inliers followed by the red then the green microcluster; labels 0/1/2 = inlier/red/green."""
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    inliers = _inliers(spec.shape, spec.n_inliers, rng)
    template = lattice_template(max(spec.red_size, spec.green_size), spec.mc_spread)
    red = _anchor(spec.shape, "red", spec.red_bridge) + template[:spec.red_size]
    green = _anchor(spec.shape, "green", spec.green_bridge) + template[:spec.green_size]
    X = np.vstack([inliers, red, green])
    labels = np.concatenate([np.zeros(spec.n_inliers, dtype=np.int64),
                             np.full(spec.red_size, 1, dtype=np.int64),
                             np.full(spec.green_size, 2, dtype=np.int64)])
    return DatasetHandle.from_vectors(X), labels


@dataclass(frozen=True)
class CloudSpec:
    kind: str = "uniform"
    dim: int = 2
    count: int = 1000
    seed: int = 0
    jitter: float = 1e-4


def generate_cloud(spec: CloudSpec) -> DatasetHandle:
    """Uniform points in the unit hypercube, or points on its main diagonal.

    Diagonal points are ``u * (1, ..., 1)`` plus per-coordinate uniform jitter
    in ``[-jitter/2, jitter/2]``.
    """
    if spec.kind not in ("uniform", "diagonal"):
        raise ConfigurationError(f"unknown cloud kind {spec.kind!r}")
    if not 1 <= spec.dim <= 50:
        raise ConfigurationError(f"dimensionality must be in [1, 50], got {spec.dim}")
    if spec.count < 2:
        raise ConfigurationError("a cloud needs at least two points")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if spec.kind == "uniform":
        X = rng.random((spec.count, spec.dim))
    else:
        u = rng.random(spec.count)
        X = u[:, None] + (rng.random((spec.count, spec.dim)) - 0.5) * spec.jitter
    return DatasetHandle.from_vectors(X)


def planted_outlier_corpus(seed: int, n_inliers: int = 10_000, n_singletons: int = 10,
                           mc_size: int = 5, bridge: float = 8.0, mc_spread: float = 0.1
                           ) -> tuple[DatasetHandle, np.ndarray]:
    """Gaussian inliers plus far singletons and one tight microcluster; labels 1 mark outliers.

    Singletons sit at distance ``bridge + U(0, 4)`` sigma in random directions;
    the microcluster at ``bridge`` sigma.
    """
    if bridge <= INLIER_EXTENT:
        raise ConfigurationError(f"bridge must exceed the inlier extent ({INLIER_EXTENT} sigma)")
    rng = np.random.Generator(np.random.PCG64(seed))
    inliers = rng.standard_normal((n_inliers, 2))
    angles = rng.uniform(0, 2 * np.pi, n_singletons + 1)
    dist = bridge + rng.uniform(0, 4, n_singletons)
    singles = np.column_stack([dist * np.cos(angles[:-1]), dist * np.sin(angles[:-1])])
    centre = bridge * np.array([np.cos(angles[-1]), np.sin(angles[-1])])
    mc = centre + rng.standard_normal((mc_size, 2)) * mc_spread
    X = np.vstack([inliers, singles, mc])
    labels = np.concatenate([np.zeros(n_inliers, dtype=np.int64),
                             np.ones(n_singletons + mc_size, dtype=np.int64)])
    return DatasetHandle.from_vectors(X), labels


def write_vectors_csv(data: DatasetHandle, path) -> None:
    """``id,x0,x1,...`` with floats at 17 significant digits (round-trips exactly)."""
    X = data.vectors
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id," + ",".join(f"x{k}" for k in range(X.shape[1])) + "\n")
        for i, row in enumerate(X):
            fh.write(f"{i}," + ",".join(f"{v:.17g}" for v in row) + "\n")


def write_labels_csv(labels, path, names=LABEL_NAMES) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "label"])
        for i, lab in enumerate(labels):
            w.writerow([i, names[int(lab)] if names is not None else int(lab)])
