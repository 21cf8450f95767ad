"""Distance contracts and datasets.

A :class:`DatasetHandle` couples an ordered collection of elements with a
:class:`MetricSpec`. Elements are addressed by their 0-based ordinal; all
index and pipeline code works on ordinals and asks the handle for distances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import ConfigurationError, ContractViolation, InputError

KINDS = ("lp", "edit", "external")


@dataclass(frozen=True)
class MetricSpec:
    """Distance function plus the metadata needed for the transformation cost.

    ``kind`` is ``"lp"`` (Minkowski distance with exponent ``p``), ``"edit"``
    (unit-cost Levenshtein) or ``"external"`` (caller-provided ``func`` and
    ``t``).
    """

    kind: str = "lp"
    p: float = 2.0
    dim: int | None = None
    alphabet_size: int | None = None
    max_word_length: int | None = None
    t: float | None = None
    func: Callable[[Any, Any], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown metric kind {self.kind!r}")
        if self.kind == "lp":
            if not self.p >= 1:
                raise ConfigurationError(f"Lp exponent must be >= 1, got {self.p}")
            if self.dim is not None and self.dim < 1:
                raise ConfigurationError("vector dimensionality must be positive")
        if self.kind == "external":
            if self.func is None or not callable(self.func):
                raise ConfigurationError("external metric needs a distance callback")
            if self.t is None or not self.t > 0:
                raise ConfigurationError("external metric needs a positive transformation cost t")

    @classmethod
    def lp(cls, dim: int | None = None, p: float = 2.0) -> "MetricSpec":
        return cls(kind="lp", p=float(p), dim=dim)

    @classmethod
    def edit(cls, alphabet_size: int | None = None, max_word_length: int | None = None) -> "MetricSpec":
        return cls(kind="edit", alphabet_size=alphabet_size, max_word_length=max_word_length)

    @classmethod
    def external(cls, func: Callable[[Any, Any], float], t: float) -> "MetricSpec":
        return cls(kind="external", func=func, t=float(t))


def transformation_cost(spec: MetricSpec) -> float:
    """Bits needed to move an element one unit of distance.

    Dimensionality for vectors; ``<3> + <alphabet> + <longest word>`` for edit
    distance; the caller's ``t`` for external metrics.
    """
    from .detect import code_length

    if spec.kind == "lp":
        if spec.dim is None:
            raise ConfigurationError("vector metric has no dimensionality")
        return float(spec.dim)
    if spec.kind == "edit":
        if not spec.alphabet_size or not spec.max_word_length:
            raise ConfigurationError("edit-distance metric needs alphabet_size and max_word_length")
        return code_length(3) + code_length(spec.alphabet_size) + code_length(spec.max_word_length)
    return float(spec.t)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance, two-row dynamic programme."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _minkowski(u: np.ndarray, v: np.ndarray, p: float) -> float:
    diff = np.abs(np.asarray(u, dtype=np.float64) - np.asarray(v, dtype=np.float64))
    if p == 2:
        return float(np.sqrt(np.dot(diff, diff)))
    if p == 1:
        return float(diff.sum())
    if math.isinf(p):
        return float(diff.max()) if diff.size else 0.0
    return float((diff**p).sum() ** (1.0 / p))


def distance(a: Any, b: Any, spec: MetricSpec) -> float:
    """Distance between two payloads under ``spec``."""
    if spec.kind == "lp":
        if isinstance(a, str) or isinstance(b, str):
            raise ContractViolation("string payload given to a vector metric")
        u = np.asarray(a, dtype=np.float64)
        v = np.asarray(b, dtype=np.float64)
        if u.ndim != 1 or u.shape != v.shape:
            raise ContractViolation(f"vector shapes differ: {u.shape} vs {v.shape}")
        return _minkowski(u, v, spec.p)
    if spec.kind == "edit":
        if not (isinstance(a, str) and isinstance(b, str)):
            raise ContractViolation("edit distance needs two strings")
        return float(levenshtein(a, b))
    return float(spec.func(a, b))


def _pairwise_lp(X: np.ndarray, I: np.ndarray, J: np.ndarray, p: float) -> np.ndarray:
    diff = np.abs(X[I] - X[J])
    if p == 2:
        return np.sqrt((diff * diff).sum(axis=1))
    if p == 1:
        return diff.sum(axis=1)
    if math.isinf(p):
        return diff.max(axis=1)
    return (diff**p).sum(axis=1) ** (1.0 / p)


def _pairwise_edit(codes: np.ndarray, I: np.ndarray, J: np.ndarray) -> np.ndarray:
    # DP rows vectorized across the batch; padded columns are never read back.
    la = codes[I, 0].astype(np.int64)
    lb = codes[J, 0].astype(np.int64)
    A = codes[I, 1:]
    B = codes[J, 1:]
    k = I.shape[0]
    out = np.where(la == 0, lb, 0).astype(np.float64)
    if k == 0:
        return out
    La, Lb = int(la.max()), int(lb.max())
    rows = np.arange(k)
    prev = np.tile(np.arange(Lb + 1, dtype=np.int64), (k, 1))
    cur = np.empty_like(prev)
    for i in range(1, La + 1):
        cur[:, 0] = i
        ai = A[:, i - 1]
        for j in range(1, Lb + 1):
            cur[:, j] = np.minimum(
                np.minimum(prev[:, j], cur[:, j - 1]) + 1,
                prev[:, j - 1] + (ai != B[:, j - 1]),
            )
        done = la == i
        if done.any():
            out[done] = cur[rows[done], lb[done]]
        prev, cur = cur, prev
    return out


class DatasetHandle:
    """Ordered elements with an attached distance contract.

    Build with :meth:`from_vectors`, :meth:`from_strings` or
    :meth:`from_objects`. ``labels`` optionally carries external identifiers
    for serialization; ordinals ``0..n-1`` are used everywhere else.
    """

    def __init__(self, payload, metric: MetricSpec, labels: Sequence | None = None):
        self.metric = metric
        self.vectors: np.ndarray | None = None
        self.strings: list[str] | None = None
        self.objects: list | None = None
        self.codes: np.ndarray | None = None
        if metric.kind == "lp":
            X = np.asarray(payload, dtype=np.float64)
            if X.ndim != 2:
                raise InputError("vector payload must be a 2-d array (n, dim)")
            if not np.isfinite(X).all():
                raise InputError("vector payload contains NaN or infinite coordinates")
            if metric.dim is not None and metric.dim != X.shape[1]:
                raise ConfigurationError(f"metric dim {metric.dim} != data dim {X.shape[1]}")
            self.vectors = np.ascontiguousarray(X)
            self.n = X.shape[0]
        elif metric.kind == "edit":
            words = list(payload)
            if not all(isinstance(w, str) for w in words):
                raise InputError("edit-distance datasets hold strings only")
            self.strings = words
            self.codes = _encode_strings(words)
            self.n = len(words)
        else:
            self.objects = list(payload)
            self.n = len(self.objects)
        if labels is not None and len(labels) != self.n:
            raise InputError("labels length does not match the number of elements")
        self.labels = list(labels) if labels is not None else None

    @classmethod
    def from_vectors(cls, X, p: float = 2.0, labels=None) -> "DatasetHandle":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        return cls(X, MetricSpec.lp(dim=X.shape[1] if X.ndim == 2 else None, p=p), labels)

    @classmethod
    def from_strings(cls, words: Sequence[str], alphabet_size: int | None = None,
                     max_word_length: int | None = None, labels=None) -> "DatasetHandle":
        words = list(words)
        if alphabet_size is None:
            alphabet_size = len(set("".join(words)))
        if max_word_length is None:
            max_word_length = max((len(w) for w in words), default=0)
        return cls(words, MetricSpec.edit(alphabet_size, max_word_length), labels)

    @classmethod
    def from_objects(cls, objects: Sequence, func: Callable, t: float, labels=None) -> "DatasetHandle":
        return cls(list(objects), MetricSpec.external(func, t), labels)

    def __len__(self) -> int:
        return self.n

    @property
    def kind(self) -> str:
        return self.metric.kind

    def element(self, i: int):
        if self.vectors is not None:
            return self.vectors[i]
        if self.strings is not None:
            return self.strings[i]
        return self.objects[i]

    def label(self, i: int):
        return self.labels[i] if self.labels is not None else i

    def dist(self, i: int, j: int) -> float:
        return distance(self.element(i), self.element(j), self.metric)

    def dist_pairs(self, I, J) -> np.ndarray:
        """Distances between ``I[k]`` and ``J[k]`` for every k."""
        I = np.asarray(I, dtype=np.int64)
        J = np.asarray(J, dtype=np.int64)
        if self.vectors is not None:
            return _pairwise_lp(self.vectors, I, J, self.metric.p)
        if self.codes is not None:
            return _pairwise_edit(self.codes, I, J)
        f = self.metric.func
        return np.fromiter((f(self.objects[a], self.objects[b]) for a, b in zip(I, J)),
                           dtype=np.float64, count=I.shape[0])

    def dist_many(self, i: int, J) -> np.ndarray:
        J = np.asarray(J, dtype=np.int64)
        return self.dist_pairs(np.full(J.shape[0], i, dtype=np.int64), J)

    def kernel_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(vectors, string codes) for the compiled kernels; the unused one is empty."""
        if self.vectors is not None:
            return self.vectors, np.empty((0, 1), dtype=np.int32)
        if self.codes is not None:
            return np.empty((0, 1), dtype=np.float64), self.codes
        raise TypeError("external metrics have no compiled kernel")

    def transformation_cost(self) -> float:
        return transformation_cost(self.metric)


def _encode_strings(words: list[str]) -> np.ndarray:
    alphabet = {ch: k for k, ch in enumerate(sorted(set("".join(words))))}
    width = max((len(w) for w in words), default=0)
    codes = np.full((len(words), width + 1), -1, dtype=np.int32)
    for r, w in enumerate(words):
        codes[r, 0] = len(w)
        codes[r, 1:len(w) + 1] = [alphabet[ch] for ch in w]
    return codes
