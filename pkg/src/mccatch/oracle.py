"""Radii ladder, neighbor-count profiles, plateaus and the Oracle plot.

Grid indices are 1-based throughout: ``e`` refers to radius ``r_e`` and
``radii[e - 1]``. Index 0 means "absent" in plateau columns and "below r_1"
for quantized distances.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ContractViolation
from .index import MetricTree, count_self_join


@dataclass(frozen=True, eq=False)
class RadiiSchedule:
    diameter: float
    radii: np.ndarray

    @property
    def a(self) -> int:
        return int(self.radii.shape[0])

    @property
    def r1(self) -> float:
        return float(self.radii[0])

    def r(self, e: int) -> float:
        """Radius ``r_e``; ``r(0)`` is 0."""
        return 0.0 if e == 0 else float(self.radii[e - 1])

    def grid_index(self, x):
        """Largest ``e`` with ``r_e <= x``, or 0 when ``x < r_1``."""
        return np.searchsorted(self.radii, x, side="right")


def radii_schedule(l: float, a: int) -> RadiiSchedule:
    if a < 2:
        raise ConfigurationError(f"number of radii must be >= 2, got {a}")
    if not l > 0:
        raise ContractViolation("diameter must be positive")
    radii = np.array([l / 2.0 ** (a - e) for e in range(1, a + 1)])
    return RadiiSchedule(diameter=float(l), radii=radii)


@dataclass(eq=False)
class NeighborProfile:
    """``counts[i, e - 1]`` is the neighbor count of i at ``r_e``; 0 where not computed.

    Entry e exists only when ``counts[i, e - 2] <= c``, so the known entries of
    every row form a prefix.
    """

    counts: np.ndarray
    c: int

    def known(self, i: int) -> np.ndarray:
        row = self.counts[i]
        return row[: int(np.count_nonzero(row))]


def neighbor_profiles(tree: MetricTree, schedule: RadiiSchedule, c: int) -> NeighborProfile:
    """Count neighbors at each radius, querying only elements still at or below ``c``.

    The top radius is never joined: it reaches every element by construction.
    """
    n, a = tree.size, schedule.a
    if tree.size != tree.data.n:
        raise ContractViolation("profiles need a tree over the whole dataset")
    counts = np.zeros((n, a), dtype=np.int64)
    counts[:, 0] = count_self_join(tree, schedule.radii[0])
    for e in range(1, a):
        active = np.flatnonzero((counts[:, e - 1] > 0) & (counts[:, e - 1] <= c))
        if active.size == 0:
            break
        if e == a - 1:
            counts[active, e] = n
        else:
            counts[active, e] = count_self_join(tree, schedule.radii[e], active)
    return NeighborProfile(counts=counts, c=int(c))


@dataclass(frozen=True)
class Plateau:
    start: int
    end: int
    height: int
    length: float


def _slopes(counts: np.ndarray, radii: np.ndarray) -> np.ndarray:
    logc = np.log(np.maximum(counts, 1).astype(np.float64))
    logr = np.log(radii)
    return (logc[..., 1:] - logc[..., :-1]) / (logr[1:] - logr[:-1])


def find_plateaus(counts, schedule: RadiiSchedule, b: float, c: int) -> list[Plateau]:
    """Maximal radius ranges over which one element's count grows with slope <= ``b``.

    ``counts`` holds ``nn_1, nn_2, ...``; a zero or the end of the array marks
    where the counts stop being known. Plateaus taller than ``c`` are dropped.
    """
    counts = np.asarray(counts, dtype=np.int64)
    known = int(np.argmin(counts > 0)) if (counts <= 0).any() else counts.size
    counts = counts[:known]
    radii = schedule.radii
    if counts.size < 2:
        return []
    slope = _slopes(counts, radii[:counts.size])
    found = []
    s = None
    for k in range(slope.size + 1):
        flat = k < slope.size and slope[k] <= b
        if flat and s is None:
            s = k
        elif not flat and s is not None:
            height = int(counts[s])
            if height <= c:
                found.append(Plateau(s + 1, k + 1, height, float(radii[k] - radii[s])))
            s = None
    return found


@dataclass(eq=False)
class OraclePlot:
    """Per-element 1NN Distance ``x`` and Group 1NN Distance ``y`` with their plateau indices."""

    x: np.ndarray
    y: np.ndarray
    first_end: np.ndarray
    middle_start: np.ndarray
    middle_end: np.ndarray

    def __len__(self) -> int:
        return int(self.x.shape[0])

    def to_tsv(self, path, labels=None) -> None:
        idx = lambda v: str(int(v)) if v > 0 else ""
        with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("id\tx\ty\tfirst_end_index\tmiddle_start_index\tmiddle_end_index\n")
            for i in range(len(self)):
                name = labels[i] if labels is not None else i
                fh.write(f"{name}\t{self.x[i]:.17g}\t{self.y[i]:.17g}\t{idx(self.first_end[i])}"
                         f"\t{idx(self.middle_start[i])}\t{idx(self.middle_end[i])}\n")


def build_oracle_plot(profiles: NeighborProfile, schedule: RadiiSchedule, b: float,
                      c: int | None = None) -> OraclePlot:
    """Extract first and middle plateaus for every element at once.

    Vectorized over elements; gives the same plateaus as :func:`find_plateaus`
    row by row. Equal-length middle plateaus keep the earlier one.
    """
    c = profiles.c if c is None else int(c)
    counts = profiles.counts
    n, a = counts.shape
    radii = schedule.radii
    known = counts > 0
    flat = known[:, 1:] & (_slopes(counts, radii) <= b)

    run = np.zeros(n, dtype=np.int64)
    first_end = np.zeros(n, dtype=np.int64)
    mid_s = np.zeros(n, dtype=np.int64)
    mid_e = np.zeros(n, dtype=np.int64)
    best = np.full(n, -1.0)

    def close(mask, end):
        rows = np.flatnonzero(mask)
        s = run[rows]
        height = counts[rows, s - 1]
        length = radii[end - 1] - radii[s - 1]
        first = height == 1
        first_end[rows[first]] = end
        mid = (height > 1) & (height <= c) & (end != a) & (length > best[rows])
        rows, s, length = rows[mid], s[mid], length[mid]
        mid_s[rows], mid_e[rows], best[rows] = s, end, length

    for k in range(a - 1):
        f = flat[:, k]
        run[f & (run == 0)] = k + 1
        closing = ~f & (run > 0)
        close(closing, k + 1)
        run[closing] = 0
    close(run > 0, a)

    x = np.where(first_end > 0, radii[np.maximum(first_end, 1) - 1] - radii[0], 0.0)
    y = np.where(mid_e > 0, radii[np.maximum(mid_e, 1) - 1] - radii[np.maximum(mid_s, 1) - 1], 0.0)
    return OraclePlot(x=x, y=y, first_end=first_end, middle_start=mid_s, middle_end=mid_e)
