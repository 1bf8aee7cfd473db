"""Score-space maps that preserve individual fairness.

Post-composing a Lipschitz predictor with a non-expansive map of the real
line keeps it Lipschitz. The maps here are the building blocks of the
gerrymandering attacks: isometries (translations, reflections), contractions,
local contractions and folds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .core import ScoredPopulation
from .errors import InvalidDomain, InvalidTransform, NonFiniteInput

SLACK = 1e-12


def folding(x, a, b):
    """Vectorized fold of ``x`` at ``[a, b]``; broadcasts over all three arguments."""
    x = np.asarray(x, dtype=float)
    return np.where(x > b, x - 2.0 * (b - a), np.where(x >= a, 2.0 * a - x, x))


class ScoreTransform:
    """Base class. Subclasses implement :meth:`apply` on float arrays."""

    kind: str = ""

    def apply(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, y: float) -> float:
        return apply_transform(self, y)

    def breakpoints(self) -> tuple[float, ...]:
        """Points where the map changes piece; used to seed boundary checks."""
        return ()

    def boundary_points(self) -> list[float]:
        pts: set[float] = set()
        for c in self.breakpoints():
            pts.update((c - 1.0, c, c + 1.0))
        return sorted(pts)

    def to_json(self) -> dict:
        raise NotImplementedError


def _finite(*vals):
    for v in vals:
        if not math.isfinite(v):
            raise InvalidTransform(f"transform parameter must be finite, got {v!r}")


@dataclass(frozen=True)
class Translation(ScoreTransform):
    c: float
    kind = "translate"

    def __post_init__(self):
        _finite(self.c)

    def apply(self, y):
        return np.asarray(y, dtype=float) + self.c

    def to_json(self):
        return {"kind": self.kind, "c": self.c}


@dataclass(frozen=True)
class Reflection(ScoreTransform):
    center: float
    kind = "reflect"

    def __post_init__(self):
        _finite(self.center)

    def apply(self, y):
        return 2.0 * self.center - np.asarray(y, dtype=float)

    def breakpoints(self):
        return (self.center,)

    def to_json(self):
        return {"kind": self.kind, "center": self.center}


@dataclass(frozen=True)
class Contraction(ScoreTransform):
    """``y -> center + k (y - center)`` with ``0 <= k < 1``."""

    k: float
    center: float = 0.0
    kind = "contract"

    def __post_init__(self):
        _finite(self.k, self.center)
        if not 0.0 <= self.k < 1.0:
            raise InvalidTransform(f"contraction factor must lie in [0, 1), got {self.k}")

    def apply(self, y):
        return self.center + self.k * (np.asarray(y, dtype=float) - self.center)

    def breakpoints(self):
        return (self.center,)

    def to_json(self):
        return {"kind": self.kind, "k": self.k, "center": self.center}


@dataclass(frozen=True)
class ConstantCollapse(ScoreTransform):
    y_star: float
    kind = "collapse"

    def __post_init__(self):
        _finite(self.y_star)

    def apply(self, y):
        return np.full_like(np.asarray(y, dtype=float), self.y_star)

    def breakpoints(self):
        return (self.y_star,)

    def to_json(self):
        return {"kind": self.kind, "y_star": self.y_star}


@dataclass(frozen=True)
class LocalContraction(ScoreTransform):
    """Collapse ``[t, t_prime]`` onto ``t_star`` and close the gap from both sides.

    Scores below ``t`` move up by ``t_star - t``, scores above ``t_prime`` move
    down by ``t_prime - t_star``.
    """

    t: float
    t_prime: float
    t_star: float
    kind = "local_contract"

    def __post_init__(self):
        _finite(self.t, self.t_prime, self.t_star)
        if not self.t < self.t_prime:
            raise InvalidTransform(f"need t < t_prime, got {self.t} and {self.t_prime}")
        if not self.t <= self.t_star <= self.t_prime:
            raise InvalidTransform("t_star must lie in [t, t_prime]")

    def apply(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(
            y < self.t,
            y + (self.t_star - self.t),
            np.where(y > self.t_prime, y - (self.t_prime - self.t_star), self.t_star),
        )

    def breakpoints(self):
        return (self.t, self.t_prime)

    def boundary_points(self):
        w = self.t_prime - self.t
        return sorted(
            {self.t - w, self.t - w / 3, self.t, self.t_star, self.t_prime,
             self.t + w / 3, self.t_prime + w / 3, self.t_prime + w}
        )

    def to_json(self):
        return {"kind": self.kind, "t": self.t, "t_prime": self.t_prime, "t_star": self.t_star}


@dataclass(frozen=True)
class Folding(ScoreTransform):
    """Reverse scores inside ``[a, b]``, shift scores above ``b`` down by ``2(b - a)``."""

    a: float
    b: float
    kind = "fold"

    def __post_init__(self):
        _finite(self.a, self.b)
        if not self.a < self.b:
            raise InvalidTransform(f"fold needs a < b, got a={self.a}, b={self.b}")

    def apply(self, y):
        return folding(y, self.a, self.b)

    def breakpoints(self):
        return (self.a, self.b)

    def boundary_points(self):
        return fold_case_points(self.a, self.b)

    def to_json(self):
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Composition(ScoreTransform):
    """Apply ``steps`` left to right."""

    steps: tuple[ScoreTransform, ...] = field(default=())
    kind = "compose"

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise InvalidTransform("composition needs at least one step")

    def _fused(self):
        # adjacent translations are merged so that inverse shifts cancel exactly
        fused: list[ScoreTransform] = []
        for step in self.steps:
            if isinstance(step, Translation) and fused and isinstance(fused[-1], Translation):
                fused[-1] = Translation(fused[-1].c + step.c)
            else:
                fused.append(step)
        return fused

    def apply(self, y):
        out = np.asarray(y, dtype=float)
        for step in self._fused():
            out = step.apply(out)
        return out

    def breakpoints(self):
        return tuple(c for s in self.steps for c in s.breakpoints())

    def boundary_points(self):
        return sorted({p for s in self.steps for p in s.boundary_points()})

    def to_json(self):
        return {"kind": self.kind, "steps": [s.to_json() for s in self.steps]}


IDENTITY = Translation(0.0)


def fold_case_points(a: float, b: float) -> list[float]:
    """Deterministic points whose pairs cover every relative position w.r.t. ``[a, b]``.

    Pairs drawn from this set hit: both below ``a``, both inside, both above
    ``b``, above/inside, above/below and inside/below, including the endpoints.
    """
    w = b - a
    return [a - w, a - w / 3, a, a + w / 3, a + 2 * w / 3, b, b + w / 3, b + w]


def transform_from_json(obj: Mapping) -> ScoreTransform:
    if not isinstance(obj, Mapping) or "kind" not in obj:
        raise InvalidTransform(f"transform spec must be an object with a 'kind': {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "translate":
            return Translation(float(obj["c"]))
        if kind == "reflect":
            return Reflection(float(obj["center"]))
        if kind == "contract":
            return Contraction(float(obj["k"]), float(obj.get("center", 0.0)))
        if kind == "collapse":
            return ConstantCollapse(float(obj["y_star"]))
        if kind == "local_contract":
            return LocalContraction(float(obj["t"]), float(obj["t_prime"]), float(obj["t_star"]))
        if kind == "fold":
            return Folding(float(obj["a"]), float(obj["b"]))
        if kind == "compose":
            return Composition(tuple(transform_from_json(s) for s in obj["steps"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidTransform):
            raise
        raise InvalidTransform(f"bad parameters for {kind!r}: {exc}") from None
    raise InvalidTransform(f"unknown transform kind {kind!r}")


def apply_transform(phi: ScoreTransform, y: float) -> float:
    if not math.isfinite(y):
        raise NonFiniteInput(f"cannot transform non-finite score {y!r}")
    return float(phi.apply(np.array([y], dtype=float))[0])


def apply_to_scored(phi: ScoreTransform, sp: ScoredPopulation) -> ScoredPopulation:
    """The post-composed predictor ``phi . M`` on the same population."""
    return sp.with_scores(phi.apply(sp.score_array).tolist())


@dataclass(frozen=True)
class NonExpansivenessReport:
    passed: bool
    max_ratio_pair: tuple | None
    violations: list
    n_pairs: int = 0

    @property
    def max_ratio(self) -> float:
        if self.max_ratio_pair is None:
            return 0.0
        _, _, num, den = self.max_ratio_pair
        return num / den

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "n_pairs": self.n_pairs,
            "max_ratio": self.max_ratio,
            "max_ratio_pair": list(self.max_ratio_pair) if self.max_ratio_pair else None,
            "violations": [
                {"p": p, "q": q, "image_distance": n, "distance": d}
                for p, q, n, d in self.violations
            ],
        }


def _pair_check(phi, P, Q, slack, max_violations):
    num = np.abs(phi.apply(P) - phi.apply(Q))
    den = np.abs(P - Q)
    bad = np.nonzero(num > den + slack)[0]
    viol = [(float(P[i]), float(Q[i]), float(num[i]), float(den[i])) for i in bad[:max_violations]]
    best = None
    nz = den > 0
    if nz.any():
        ratio = np.where(nz, num / np.where(nz, den, 1.0), -np.inf)
        i = int(np.argmax(ratio))
        best = (float(P[i]), float(Q[i]), float(num[i]), float(den[i]))
    return viol, len(bad), best


def check_nonexpansive(
    phi: ScoreTransform,
    domain_lo: float,
    domain_hi: float,
    n_random_pairs: int = 10_000,
    rng_seed: int = 0,
    boundary_points: Sequence[float] | None = None,
    slack: float = SLACK,
    max_violations: int = 100,
) -> NonExpansivenessReport:
    """Randomized plus boundary oracle for ``|phi(p) - phi(q)| <= |p - q|``.

    Checks ``n_random_pairs`` uniform pairs from ``[domain_lo, domain_hi]``,
    every pair of boundary points, and every (boundary, random) pair. The
    default boundary set comes from the transform itself; for a fold it covers
    all six relative placements of a pair around ``[a, b]``.
    """
    if not (math.isfinite(domain_lo) and math.isfinite(domain_hi) and domain_lo < domain_hi):
        raise InvalidDomain(f"need finite lo < hi, got [{domain_lo}, {domain_hi}]")
    if n_random_pairs < 1:
        raise InvalidDomain("n_random_pairs must be >= 1")
    if boundary_points is None:
        boundary_points = phi.boundary_points()
    rng = np.random.default_rng(rng_seed)
    R = rng.uniform(domain_lo, domain_hi, size=(2, n_random_pairs))
    Ps, Qs = [R[0]], [R[1]]

    B = np.unique(np.asarray(list(boundary_points), dtype=float))
    if len(B) >= 2:
        i, j = np.array(list(combinations(range(len(B)), 2))).T
        Ps.append(B[i])
        Qs.append(B[j])
    if len(B):
        pool = R.reshape(-1)[:1000]
        Ps.append(np.repeat(B, len(pool)))
        Qs.append(np.tile(pool, len(B)))
    P = np.concatenate(Ps)
    Q = np.concatenate(Qs)
    viol, n_bad, best = _pair_check(phi, P, Q, slack, max_violations)
    return NonExpansivenessReport(n_bad == 0, best, viol, len(P))


def isometry_check(phi: ScoreTransform, pairs: Sequence[tuple[float, float]], tol: float = SLACK) -> bool:
    """True iff ``phi`` preserves every pair distance to within ``tol``."""
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    if len(arr) == 0:
        raise ValueError("pairs must be non-empty")
    P, Q = arr[:, 0], arr[:, 1]
    return bool(np.all(np.abs(np.abs(phi.apply(P) - phi.apply(Q)) - np.abs(P - Q)) <= tol))
