"""Individual-fairness audits, group selection statistics and Leibniz tables."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .aif import DistributionTable
from .core import ScoredPopulation, Threshold
from .errors import InputError, MissingIndividual, OutcomeSetMismatch
from .metrics import (
    FEATURE_SPACE,
    SCORE_SPACE,
    UID_SPACE,
    PseudoMetricSpec,
    distance_block,
    points_array,
)

DEFAULT_SLACK = 1e-12
_BLOCK_ROWS = 256


@dataclass(frozen=True)
class AuditConfig:
    d_spec: PseudoMetricSpec
    D_spec: PseudoMetricSpec
    slack: float = DEFAULT_SLACK

    def __post_init__(self):
        if self.d_spec.domain not in (FEATURE_SPACE, UID_SPACE):
            raise InputError("the individual metric must act on feature-space or uid-space")
        if self.D_spec.domain != SCORE_SPACE:
            raise InputError("the prediction metric must act on score-space")
        if not (self.slack >= 0 and math.isfinite(self.slack)):
            raise InputError("slack must be a finite non-negative number")

    def to_json(self) -> dict:
        return {"d": self.d_spec.to_json(), "D": self.D_spec.to_json(), "slack": self.slack}

    @classmethod
    def from_json(cls, obj: Mapping, slack: float | None = None) -> "AuditConfig":
        if "d" not in obj or "D" not in obj:
            raise InputError("metric config needs both 'd' and 'D'")
        d = PseudoMetricSpec.from_json(obj["d"], default_domain=FEATURE_SPACE)
        D = PseudoMetricSpec.from_json(obj["D"], default_domain=SCORE_SPACE)
        if slack is None:
            slack = float(obj.get("slack", DEFAULT_SLACK))
        return cls(d, D, slack)


@dataclass(frozen=True)
class AuditReport:
    passed: bool
    n_pairs: int
    violations: list = field(default_factory=list)
    max_slack_used: float = 0.0

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "n_pairs": self.n_pairs,
            "n_violations": len(self.violations),
            "max_slack_used": self.max_slack_used,
            "violations": [{"p": p, "q": q, "d": d, "D": D} for p, q, d, D in self.violations],
        }


def audit_if(sp: ScoredPopulation, cfg: AuditConfig) -> AuditReport:
    """Exhaustive Lipschitz audit: ``D(M p, M q) <= d(p, q) + slack`` over all unordered pairs.

    ``max_slack_used`` is the largest positive excess ``D - d`` among pairs
    that pass only thanks to the slack. Violations are sorted by id pair.
    """
    inds = sp.population.individuals
    n = len(inds)
    X = points_array(cfg.d_spec, inds)
    s = sp.score_array
    ids = sp.population.ids
    violations = []
    max_used = 0.0
    for i0 in range(0, n, _BLOCK_ROWS):
        i1 = min(n, i0 + _BLOCK_ROWS)
        # only columns j > i are needed; the block covers j >= i0
        d = distance_block(cfg.d_spec, X[i0:i1], X[i0:])
        D = distance_block(cfg.D_spec, s[i0:i1], s[i0:])
        upper = np.triu(np.ones(d.shape, dtype=bool), k=1)
        excess = np.where(upper, D - d, -np.inf)
        bad = excess > cfg.slack
        used = excess[(excess > 0) & ~bad]
        if used.size:
            max_used = max(max_used, float(used.max()))
        for a, b in zip(*np.nonzero(bad)):
            p, q = ids[i0 + a], ids[i0 + b]
            if q < p:
                p, q = q, p
            violations.append((p, q, float(d[a, b]), float(D[a, b])))
    violations.sort(key=lambda v: (v[0], v[1]))
    return AuditReport(not violations, n * (n - 1) // 2, violations, max_used)


# -- group statistics --------------------------------------------------------

@dataclass(frozen=True)
class GroupRate:
    count: int
    positives: int
    selection_rate: float


@dataclass(frozen=True)
class ConcentrationRecord:
    interval: tuple[float, float]
    group: str
    n_in_interval: int
    n_group_in_interval: int
    fraction_of_interval: float | None
    base_rate: float
    overrepresentation_ratio: float | None

    @property
    def empty(self) -> bool:
        return self.n_in_interval == 0

    def to_json(self) -> dict:
        return {
            "interval": list(self.interval),
            "group": self.group,
            "n_in_interval": self.n_in_interval,
            "n_group_in_interval": self.n_group_in_interval,
            "fraction_of_interval": self.fraction_of_interval,
            "base_rate": self.base_rate,
            "overrepresentation_ratio": self.overrepresentation_ratio,
            "empty_interval": self.empty,
        }


@dataclass(frozen=True)
class GroupStats:
    per_group: Mapping[str, GroupRate]
    spd: float
    threshold: Threshold | None = None
    interval_concentration: ConcentrationRecord | None = None

    def rate(self, group: str) -> float:
        return self.per_group[group].selection_rate

    def to_json(self) -> dict:
        out = {
            "per_group": {
                g: {"count": r.count, "positives": r.positives, "selection_rate": r.selection_rate}
                for g, r in sorted(self.per_group.items())
            },
            "spd": self.spd,
        }
        if self.threshold is not None:
            out["threshold"] = self.threshold.to_json()
        if self.interval_concentration is not None:
            out["interval_concentration"] = self.interval_concentration.to_json()
        return out


def selection_rates(sp: ScoredPopulation, th: Threshold) -> GroupStats:
    if len(sp) == 0:
        raise InputError("selection rates need at least one individual")
    pos = th.positive(sp.score_array)
    groups = sp.population.group_array
    per_group = {}
    for g in sp.population.groups:
        mask = groups == g
        count = int(mask.sum())
        k = int(pos[mask].sum())
        per_group[g] = GroupRate(count, k, k / count)
    rates = [r.selection_rate for r in per_group.values()]
    spd = max(rates) - min(rates)
    return GroupStats(per_group, spd, th)


def interval_concentration(sp: ScoredPopulation, lo: float, hi: float, group: str) -> ConcentrationRecord:
    """Share of ``group`` among individuals scoring in ``[lo, hi]``, against its base rate."""
    if not lo < hi:
        raise InputError(f"interval needs lo < hi, got [{lo}, {hi}]")
    s = sp.score_array
    in_group = sp.population.group_array == group
    inside = (s >= lo) & (s <= hi)
    n_in = int(inside.sum())
    n_g = int((inside & in_group).sum())
    base = float(in_group.mean()) if len(s) else 0.0
    frac = n_g / n_in if n_in else None
    ratio = frac / base if (frac is not None and base > 0) else None
    return ConcentrationRecord((lo, hi), group, n_in, n_g, frac, base, ratio)


# -- Leibniz tables ----------------------------------------------------------

class LeibnizTable(DistributionTable):
    """The fully specified per-individual prediction distributions a fair predictor must match."""


@dataclass(frozen=True)
class LeibnizAudit:
    passed: bool
    mismatches: list
    n_checked: int

    def to_json(self) -> dict:
        return {"passed": self.passed, "n_checked": self.n_checked, "mismatches": self.mismatches}


def leibniz_audit(predictor_dists: DistributionTable, table: DistributionTable) -> LeibnizAudit:
    """Exact rational match of every specified individual's distribution."""
    if predictor_dists.outcome_labels != table.outcome_labels:
        raise OutcomeSetMismatch(
            f"outcome sets differ: {list(predictor_dists.outcome_labels)} vs {list(table.outcome_labels)}"
        )
    for id_ in table.per_id:
        if id_ not in predictor_dists.per_id:
            raise MissingIndividual(id_)
    mismatches = [id_ for id_, row in table.per_id.items() if predictor_dists.per_id[id_] != row]
    return LeibnizAudit(not mismatches, mismatches, len(table.per_id))
