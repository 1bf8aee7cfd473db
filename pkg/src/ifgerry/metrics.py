"""Declarative pseudo-metrics on individuals and on predictions.

A :class:`PseudoMetricSpec` names a distance function and the space it acts
on. Pseudo-metrics may assign distance zero to distinct points, which is what
makes the trivial metric (and the unique-identifier constructions) possible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .core import Individual
from .errors import DimensionMismatch, InvalidMetric, MissingUid

TRIVIAL = "trivial"
DISCRETE = "discrete"
EUCLIDEAN = "euclidean"
WEIGHTED_LP = "weighted_lp"
CAPPED_EUCLIDEAN = "capped_euclidean"
KINDS = (TRIVIAL, DISCRETE, EUCLIDEAN, WEIGHTED_LP, CAPPED_EUCLIDEAN)

FEATURE_SPACE = "feature-space"
SCORE_SPACE = "score-space"
UID_SPACE = "uid-space"
DOMAINS = (FEATURE_SPACE, SCORE_SPACE, UID_SPACE)

TRIANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class PseudoMetricSpec:
    kind: str
    domain: str = FEATURE_SPACE
    p: float = 2.0
    weights: tuple[float, ...] | None = None
    cap: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidMetric(f"unknown metric kind {self.kind!r}")
        if self.domain not in DOMAINS:
            raise InvalidMetric(f"unknown metric domain {self.domain!r}")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.kind == WEIGHTED_LP:
            if not (self.p >= 1 and math.isfinite(self.p)):
                raise InvalidMetric(f"weighted_lp exponent must be >= 1, got {self.p}")
            if self.weights is None:
                raise InvalidMetric("weighted_lp needs a weight vector")
            if any(not (w >= 0 and math.isfinite(w)) for w in self.weights):
                raise InvalidMetric("weights must be finite and non-negative")
        if self.kind == CAPPED_EUCLIDEAN and not (self.cap > 0 and math.isfinite(self.cap)):
            raise InvalidMetric(f"cap must be positive, got {self.cap}")
        if self.domain == UID_SPACE and self.kind not in (TRIVIAL, DISCRETE):
            raise InvalidMetric("uid-space only supports the trivial and discrete metrics")

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "domain": self.domain}
        if self.kind == WEIGHTED_LP:
            out["p"] = self.p
            out["weights"] = list(self.weights)
        elif self.kind == CAPPED_EUCLIDEAN:
            out["cap"] = self.cap
        return out

    @classmethod
    def from_json(cls, obj: Mapping, default_domain: str = FEATURE_SPACE) -> "PseudoMetricSpec":
        if not isinstance(obj, Mapping) or "kind" not in obj:
            raise InvalidMetric(f"metric spec must be an object with a 'kind': {obj!r}")
        kw: dict[str, Any] = {"kind": obj["kind"], "domain": obj.get("domain", default_domain)}
        if "p" in obj:
            kw["p"] = float(obj["p"])
        if "weights" in obj:
            kw["weights"] = tuple(obj["weights"])
        if "cap" in obj:
            kw["cap"] = float(obj["cap"])
        return cls(**kw)


@dataclass(frozen=True)
class MetricValidationReport:
    passed: bool
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "violations": [
                {"axiom": a, "points": [_jsonable(p) for p in pts], "values": list(vals)}
                for a, pts, vals in self.violations
            ],
        }


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    return x


def point_of(spec: PseudoMetricSpec, x):
    """Project an :class:`Individual` onto the coordinates ``spec`` measures."""
    if not isinstance(x, Individual):
        return x
    if spec.domain == UID_SPACE:
        if x.uid is None:
            raise MissingUid(f"individual {x.id!r} has no uid")
        return x.uid
    if spec.domain == FEATURE_SPACE:
        return x.features
    raise InvalidMetric("score-space metrics measure predictions, not individuals")


def points_array(spec: PseudoMetricSpec, points: Sequence) -> np.ndarray:
    """Stack points into the array layout :func:`distance_block` expects."""
    pts = [point_of(spec, x) for x in points]
    if spec.domain == UID_SPACE:
        arr = np.empty(len(pts), dtype=object)
        arr[:] = pts
        return arr
    if spec.domain == SCORE_SPACE:
        return np.asarray(pts, dtype=float).reshape(-1)
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(len(pts), -1) if len(pts) else arr.reshape(0, 0)
    return arr


def _check_dims(spec, P, Q):
    if spec.domain != FEATURE_SPACE:
        return
    if P.shape[1] != Q.shape[1]:
        raise DimensionMismatch(f"feature dimensions differ: {P.shape[1]} vs {Q.shape[1]}")
    if spec.kind == WEIGHTED_LP and len(spec.weights) != P.shape[1]:
        raise DimensionMismatch(
            f"{len(spec.weights)} weights for {P.shape[1]}-dimensional features"
        )


def distance_block(spec: PseudoMetricSpec, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """All distances between rows of ``P`` and rows of ``Q``, shape ``(len(P), len(Q))``."""
    _check_dims(spec, P, Q)
    shape = (len(P), len(Q))
    if spec.kind == TRIVIAL:
        return np.zeros(shape)
    if spec.domain == UID_SPACE:
        return (P[:, None] != Q[None, :]).astype(float)
    if spec.domain == SCORE_SPACE:
        diff = np.abs(P[:, None] - Q[None, :])
        if spec.kind == DISCRETE:
            return (diff != 0).astype(float)
        if spec.kind == CAPPED_EUCLIDEAN:
            return np.minimum(diff, spec.cap)
        if spec.kind == WEIGHTED_LP:
            w = spec.weights[0] if spec.weights else 1.0
            return w ** (1.0 / spec.p) * diff
        return diff
    # feature space
    if spec.kind == DISCRETE:
        pb = np.ascontiguousarray(P).view(np.uint64)
        qb = np.ascontiguousarray(Q).view(np.uint64)
        return np.any(pb[:, None, :] != qb[None, :, :], axis=2).astype(float)
    diff = np.abs(P[:, None, :] - Q[None, :, :])
    if spec.kind == WEIGHTED_LP:
        w = np.asarray(spec.weights)
        return np.sum(w * diff ** spec.p, axis=2) ** (1.0 / spec.p)
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    if spec.kind == CAPPED_EUCLIDEAN:
        return np.minimum(dist, spec.cap)
    return dist


def eval_metric(spec: PseudoMetricSpec, p, q) -> float:
    """Distance between two points (or individuals) under ``spec``."""
    P = points_array(spec, [p])
    Q = points_array(spec, [q])
    return float(distance_block(spec, P, Q)[0, 0])


def distance_matrix(metric, sample: Sequence) -> np.ndarray:
    if isinstance(metric, PseudoMetricSpec):
        X = points_array(metric, sample)
        return distance_block(metric, X, X)
    n = len(sample)
    return np.array([[float(metric(sample[i], sample[j])) for j in range(n)] for i in range(n)])


def validate_pseudometric(
    metric: PseudoMetricSpec | Callable, sample: Sequence, slack: float = TRIANGLE_SLACK
) -> MetricValidationReport:
    """Check the pseudo-metric axioms on every pair and triple of ``sample``.

    ``metric`` may also be a plain two-argument callable, which is how broken
    distance functions are exercised in tests. Identity of indiscernibles is
    not required.
    """
    if len(sample) == 0:
        raise ValueError("sample must be non-empty")
    M = distance_matrix(metric, sample)
    n = len(sample)
    violations = []

    for i in range(n):
        if M[i, i] != 0:
            violations.append(("zero_self_distance", (sample[i],), (M[i, i],)))
    for i, j in product(range(n), repeat=2):
        if not M[i, j] >= 0:
            violations.append(("non_negativity", (sample[i], sample[j]), (M[i, j],)))
        if i < j and abs(M[i, j] - M[j, i]) > slack:
            violations.append(("symmetry", (sample[i], sample[j]), (M[i, j], M[j, i])))
    # d(i,k) <= d(i,j) + d(j,k) for all i, j, k
    excess = M[:, None, :] - (M[:, :, None] + M[None, :, :]) - slack
    for i, j, k in zip(*np.nonzero(excess > 0)):
        violations.append(
            (
                "triangle",
                (sample[i], sample[j], sample[k]),
                (M[i, k], M[i, j], M[j, k]),
            )
        )
    return MetricValidationReport(not violations, violations)
