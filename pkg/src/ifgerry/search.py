"""Brute-force search for utility-maximizing, fairness-preserving score maps.

The attacker's utility is linear: each member of the positive class adds the
weight of their group. Candidate maps come from a deterministic grid built
from the observed scores and the threshold; only maps that pass the
non-expansiveness oracle on the observed score range are admissible, so the
winning attack never breaks individual fairness of a fair predictor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .audit import AuditConfig, GroupStats, audit_if, selection_rates
from .core import ScoredPopulation, Threshold
from .errors import InputError, NoAdmissibleCandidate, UnknownFamily
from .transforms import (
    IDENTITY,
    ConstantCollapse,
    Contraction,
    Folding,
    LocalContraction,
    Reflection,
    ScoreTransform,
    Translation,
    apply_to_scored,
    check_nonexpansive,
)

EPS = 1e-9
FAMILIES = ("translate", "reflect", "contract", "collapse", "local_contract", "fold")
CONTRACTION_FACTORS = (0.25, 0.5, 0.75)


@dataclass(frozen=True)
class UtilitySpec:
    threshold: Threshold
    weight_per_group: Mapping[str, float]

    def __post_init__(self):
        w = {str(g): float(v) for g, v in self.weight_per_group.items()}
        if any(not math.isfinite(v) for v in w.values()):
            raise InputError("utility weights must be finite")
        object.__setattr__(self, "weight_per_group", w)

    def weight(self, group: str) -> float:
        return self.weight_per_group.get(group, 0.0)

    def to_json(self) -> dict:
        return {"threshold": self.threshold.to_json(), "weights": dict(sorted(self.weight_per_group.items()))}

    @classmethod
    def from_json(cls, obj: Mapping) -> "UtilitySpec":
        try:
            return cls(Threshold.from_json(obj["threshold"]), dict(obj.get("weights", {})))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"malformed utility spec: {exc}") from None


def _weights_vector(sp: ScoredPopulation, u: UtilitySpec) -> np.ndarray:
    return np.array([u.weight(ind.group) for ind in sp.population], dtype=float)


def utility(sp: ScoredPopulation, u: UtilitySpec) -> float:
    """Sum of group weights over the positive class."""
    return _utility(sp.score_array, _weights_vector(sp, u), u.threshold)


def _utility(scores, w, th) -> float:
    return float(np.sum(w[th.positive(scores)]))


def _endpoints(scores: np.ndarray, resolution: int, anchor: float) -> list[float]:
    u = np.unique(scores)
    if len(u) > resolution:
        idx = np.unique(np.round(np.linspace(0, len(u) - 1, resolution)).astype(int))
        u = u[idx]
    mids = (u[:-1] + u[1:]) / 2.0
    return sorted({float(x) for x in np.concatenate([u, mids, [anchor]])})


def candidate_grid(
    sp: ScoredPopulation,
    family: str,
    resolution: int,
    threshold: Threshold | None = None,
) -> list[ScoreTransform]:
    """Deterministic, sorted, de-duplicated candidates of one family.

    Parameters come from up to ``resolution`` observed scores (evenly spaced
    in rank), midpoints between them, and the threshold. The identity
    (``Translation(0)``) always comes first.
    """
    if family not in FAMILIES:
        raise UnknownFamily(f"unknown transform family {family!r}; known: {list(FAMILIES)}")
    if resolution < 1:
        raise InputError("resolution must be >= 1")
    s = sp.score_array
    t = threshold.t if threshold is not None else float(np.median(s))
    E = _endpoints(s, resolution, t)

    out: set[ScoreTransform] = set()
    if family == "translate":
        for e in E:
            out.update((Translation(t - e), Translation(t - e - EPS), Translation(e - t)))
    elif family == "reflect":
        for e in E:
            out.update((Reflection(e), Reflection((e + t) / 2), Reflection((e + t - EPS) / 2)))
    elif family == "contract":
        out.update(Contraction(k, e) for k in CONTRACTION_FACTORS for e in E)
    elif family == "collapse":
        out.update(ConstantCollapse(y) for y in E + [t - EPS])
    elif family == "local_contract":
        for lo, hi in combinations(E, 2):
            out.update(LocalContraction(lo, hi, ts) for ts in (lo, (lo + hi) / 2, hi))
    elif family == "fold":
        out.update(Folding(a, b) for a, b in combinations(E, 2))
    out.discard(IDENTITY)
    return [IDENTITY] + sorted(out, key=lambda phi: tuple(phi.to_json().values())[1:])


@dataclass(frozen=True)
class AttackResult:
    best_transform: ScoreTransform
    best_utility: float
    baseline_utility: float
    candidates_evaluated: int
    candidates_rejected: int
    audit_passed: bool
    audit_before_passed: bool
    group_stats_before: GroupStats
    group_stats_after: GroupStats

    def to_json(self) -> dict:
        return {
            "best_transform": self.best_transform.to_json(),
            "best_utility": self.best_utility,
            "baseline_utility": self.baseline_utility,
            "gain": self.best_utility - self.baseline_utility,
            "candidates_evaluated": self.candidates_evaluated,
            "candidates_rejected": self.candidates_rejected,
            "audit_passed": self.audit_passed,
            "audit_before_passed": self.audit_before_passed,
            "group_stats_before": self.group_stats_before.to_json(),
            "group_stats_after": self.group_stats_after.to_json(),
        }


def search_attack(
    sp: ScoredPopulation,
    u: UtilitySpec,
    families: Sequence[str],
    resolution: int,
    cfg: AuditConfig,
    n_check_pairs: int = 64,
    seed: int = 0,
    candidates: Sequence[ScoreTransform] | None = None,
) -> AttackResult:
    """Exhaustive argmax of attacker utility over admissible candidates.

    Ties go to the earliest candidate in grid order, so the identity wins
    whenever nothing strictly beats the untouched predictor. ``candidates``
    replaces the generated grid when given.
    """
    if candidates is None:
        grid: list[ScoreTransform] = [IDENTITY]
        seen = {IDENTITY}
        for fam in families:
            for phi in candidate_grid(sp, fam, resolution, u.threshold):
                if phi not in seen:
                    seen.add(phi)
                    grid.append(phi)
    else:
        grid = list(candidates)
    if not grid:
        raise NoAdmissibleCandidate("empty candidate grid")

    s = sp.score_array
    lo, hi = float(s.min()), float(s.max())
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    w = _weights_vector(sp, u)
    baseline = _utility(s, w, u.threshold)

    best, best_u = None, -math.inf
    evaluated = rejected = 0
    for phi in grid:
        if not check_nonexpansive(phi, lo, hi, n_check_pairs, seed).passed:
            rejected += 1
            continue
        evaluated += 1
        val = _utility(phi.apply(s), w, u.threshold)
        if val > best_u:
            best, best_u = phi, val
    if best is None:
        raise NoAdmissibleCandidate("no candidate passed the non-expansiveness check")

    after = apply_to_scored(best, sp)
    return AttackResult(
        best_transform=best,
        best_utility=best_u,
        baseline_utility=baseline,
        candidates_evaluated=evaluated,
        candidates_rejected=rejected,
        audit_passed=audit_if(after, cfg).passed,
        audit_before_passed=audit_if(sp, cfg).passed,
        group_stats_before=selection_rates(sp, u.threshold),
        group_stats_after=selection_rates(after, u.threshold),
    )
