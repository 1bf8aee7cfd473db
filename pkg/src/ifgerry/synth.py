"""Seeded synthetic populations for the attack scenarios.

All randomness comes from one ``numpy.random.Generator`` backed by PCG64,
seeded from the config, and consumed in a fixed order: group by group, scores
first, then features, then uids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .audit import interval_concentration
from .core import Individual, Population, ScoredPopulation
from .errors import InvalidConfig, UnknownPreset

RNG_NAME = "numpy-PCG64/default_rng/v1"
MAX_RETRIES = 100


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise InvalidConfig(f"uniform needs finite lo < hi, got ({self.lo}, {self.hi})")

    def sample(self, rng, n):
        return rng.uniform(self.lo, self.hi, size=n)

    def to_json(self):
        return {"kind": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Normal:
    mean: float
    sd: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and self.sd > 0 and math.isfinite(self.sd)):
            raise InvalidConfig(f"normal needs finite mean and sd > 0, got ({self.mean}, {self.sd})")

    def sample(self, rng, n):
        return rng.normal(self.mean, self.sd, size=n)

    def to_json(self):
        return {"kind": "normal", "mean": self.mean, "sd": self.sd}


@dataclass(frozen=True)
class PointMass:
    v: float

    def __post_init__(self):
        if not math.isfinite(self.v):
            raise InvalidConfig("point mass must be finite")

    def sample(self, rng, n):
        return np.full(n, float(self.v))

    def to_json(self):
        return {"kind": "point_mass", "v": self.v}


@dataclass(frozen=True)
class Mixture:
    components: tuple
    weights: tuple[float, ...]

    def __post_init__(self):
        if not self.components or len(self.components) != len(self.weights):
            raise InvalidConfig("mixture needs one positive weight per component")
        if any(not (w > 0 and math.isfinite(w)) for w in self.weights):
            raise InvalidConfig("mixture weights must be positive")
        total = sum(self.weights)
        object.__setattr__(self, "weights", tuple(w / total for w in self.weights))
        object.__setattr__(self, "components", tuple(self.components))

    def sample(self, rng, n):
        which = rng.choice(len(self.components), size=n, p=np.asarray(self.weights))
        out = np.empty(n)
        for k, comp in enumerate(self.components):
            mask = which == k
            out[mask] = comp.sample(rng, int(mask.sum()))
        return out

    def to_json(self):
        return {
            "kind": "mixture",
            "components": [c.to_json() for c in self.components],
            "weights": list(self.weights),
        }


@dataclass(frozen=True)
class CopyOf:
    """Reuse another (earlier) group's score multiset verbatim."""

    group: str

    def to_json(self):
        return {"kind": "copy", "of": self.group}


def distribution_from_json(obj: Mapping):
    kind = obj.get("kind")
    try:
        if kind == "uniform":
            return Uniform(float(obj["lo"]), float(obj["hi"]))
        if kind == "normal":
            return Normal(float(obj["mean"]), float(obj["sd"]))
        if kind == "point_mass":
            return PointMass(float(obj["v"]))
        if kind == "mixture":
            return Mixture(
                tuple(distribution_from_json(c) for c in obj["components"]),
                tuple(float(w) for w in obj["weights"]),
            )
        if kind == "copy":
            return CopyOf(str(obj["of"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidConfig):
            raise
        raise InvalidConfig(f"bad {kind!r} distribution: {exc}") from None
    raise InvalidConfig(f"unknown score distribution {kind!r}")


@dataclass(frozen=True)
class GroupSpec:
    label: str
    count: int
    scores: Any

    def to_json(self):
        return {"label": self.label, "count": self.count, "scores": self.scores.to_json()}


@dataclass(frozen=True)
class ConcentrationTarget:
    """Post-generation requirement: ``group`` overrepresented in ``[lo, hi]`` by ``min_ratio``."""

    group: str
    lo: float
    hi: float
    min_ratio: float

    def to_json(self):
        return {"group": self.group, "lo": self.lo, "hi": self.hi, "min_ratio": self.min_ratio}


@dataclass(frozen=True)
class ScenarioConfig:
    groups: tuple[GroupSpec, ...]
    feature_dim: int = 2
    assign_uids: bool = False
    seed: int = 0
    score_as_feature: bool = False
    name: str = ""
    version: int = 1
    params: Mapping[str, Any] = field(default_factory=dict)
    concentration: ConcentrationTarget | None = None
    rng: str = RNG_NAME

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        if self.rng != RNG_NAME:
            raise InvalidConfig(f"unsupported rng {self.rng!r}; this build provides {RNG_NAME!r}")
        if self.feature_dim < 0:
            raise InvalidConfig("feature_dim must be >= 0")
        labels = [g.label for g in self.groups]
        if len(set(labels)) != len(labels):
            raise InvalidConfig("group labels must be distinct")
        seen = {}
        for g in self.groups:
            if g.count < 0:
                raise InvalidConfig(f"group {g.label!r} has negative count")
            if isinstance(g.scores, CopyOf):
                if g.scores.group not in seen:
                    raise InvalidConfig(f"group {g.label!r} copies unknown or later group {g.scores.group!r}")
                if seen[g.scores.group] != g.count:
                    raise InvalidConfig(f"group {g.label!r} must match the size of {g.scores.group!r}")
            seen[g.label] = g.count

    def to_json(self) -> dict:
        out = {
            "rng": self.rng,
            "name": self.name,
            "version": self.version,
            "seed": self.seed,
            "feature_dim": self.feature_dim,
            "assign_uids": self.assign_uids,
            "score_as_feature": self.score_as_feature,
            "groups": [g.to_json() for g in self.groups],
            "params": dict(self.params),
        }
        if self.concentration is not None:
            out["concentration"] = self.concentration.to_json()
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "ScenarioConfig":
        if "rng" not in obj:
            raise InvalidConfig("scenario config must declare its 'rng'")
        try:
            groups = tuple(
                GroupSpec(str(g["label"]), int(g["count"]), distribution_from_json(g["scores"]))
                for g in obj["groups"]
            )
            conc = obj.get("concentration")
            return cls(
                groups=groups,
                feature_dim=int(obj.get("feature_dim", 2)),
                assign_uids=bool(obj.get("assign_uids", False)),
                seed=int(obj.get("seed", 0)),
                score_as_feature=bool(obj.get("score_as_feature", False)),
                name=str(obj.get("name", "")),
                version=int(obj.get("version", 1)),
                params=dict(obj.get("params", {})),
                concentration=ConcentrationTarget(**conc) if conc else None,
                rng=obj["rng"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidConfig):
                raise
            raise InvalidConfig(f"malformed scenario config: {exc}") from None


def _draw(cfg: ScenarioConfig, seed: int) -> ScoredPopulation:
    rng = np.random.default_rng(seed)
    inds, scores = [], {}
    by_label: dict[str, np.ndarray] = {}
    used_uids: set[str] = set()
    for g in cfg.groups:
        if isinstance(g.scores, CopyOf):
            s = by_label[g.scores.group].copy()
        else:
            s = g.scores.sample(rng, g.count)
        by_label[g.label] = s
        feats = rng.uniform(0.0, 1.0, size=(g.count, cfg.feature_dim))
        for i in range(g.count):
            uid = None
            if cfg.assign_uids:
                while uid is None or uid in used_uids:
                    uid = f"u{int(rng.integers(0, 2**63)):016x}"
                used_uids.add(uid)
            f = tuple(feats[i])
            if cfg.score_as_feature:
                f = (float(s[i]),) + f
            id_ = f"{g.label}{i:04d}"
            inds.append(Individual(id_, g.label, f, uid))
            scores[id_] = float(s[i])
    dim = cfg.feature_dim + (1 if cfg.score_as_feature else 0)
    return ScoredPopulation(Population(tuple(inds), dim), scores)


def generate(cfg: ScenarioConfig) -> ScoredPopulation:
    """Deterministic population for ``cfg``.

    When the config carries a concentration target the draw is repeated with
    seed offsets 1, 2, ... (at most ``MAX_RETRIES`` times) until it holds.
    """
    return generate_with_seed(cfg)[0]


def generate_with_seed(cfg: ScenarioConfig) -> tuple[ScoredPopulation, int]:
    """Like :func:`generate` but also returns the seed that was finally used."""
    target = cfg.concentration
    for offset in range(MAX_RETRIES + 1):
        seed = cfg.seed + offset
        sp = _draw(cfg, seed)
        if target is None:
            return sp, seed
        rec = interval_concentration(sp, target.lo, target.hi, target.group)
        if rec.overrepresentation_ratio is not None and rec.overrepresentation_ratio >= target.min_ratio:
            return sp, seed
    raise InvalidConfig(
        f"no draw met the concentration target after {MAX_RETRIES} retries"
    )


# -- presets ---------------------------------------------------------------

def _threshold_push(seed):
    # A sits just above t=3 (in [3, 4]) and well below it; B straddles with a gap over [3, 4.5).
    return ScenarioConfig(
        name="threshold_push",
        groups=(
            GroupSpec("A", 60, Mixture((Uniform(3.0, 4.0), Uniform(0.0, 2.0)), (1.0, 1.0))),
            GroupSpec("B", 60, Mixture((Uniform(0.0, 3.0), Uniform(4.5, 8.0)), (1.0, 1.0))),
        ),
        feature_dim=2,
        assign_uids=True,
        score_as_feature=True,
        seed=seed,
        params={"t": 3.0, "t_prime": 4.0, "target_group": "A"},
        concentration=ConcentrationTarget("A", 3.0, 4.0, 1.5),
    )


def _fold_target(seed):
    return ScenarioConfig(
        name="fold_target",
        groups=(
            GroupSpec("A", 60, Mixture((Uniform(3.0, 3.6), Uniform(0.0, 2.5)), (2.0, 1.0))),
            GroupSpec("B", 60, Uniform(0.0, 8.0)),
        ),
        feature_dim=2,
        assign_uids=True,
        score_as_feature=True,
        seed=seed,
        params={"t": 3.0, "a": 3.0, "b": 3.6, "target_group": "A"},
        concentration=ConcentrationTarget("A", 3.0, 3.6, 1.5),
    )


def _mirror_symmetric(seed):
    return ScenarioConfig(
        name="mirror_symmetric",
        groups=(
            GroupSpec("A", 50, Uniform(0.0, 6.0)),
            GroupSpec("B", 50, CopyOf("A")),
        ),
        feature_dim=2,
        assign_uids=True,
        score_as_feature=True,
        seed=seed,
        params={"t": 3.0},
    )


def _unique_id_vacuity(seed):
    return ScenarioConfig(
        name="unique_id_vacuity",
        groups=(
            GroupSpec("A", 25, Normal(0.0, 10.0)),
            GroupSpec("B", 25, Normal(5.0, 10.0)),
        ),
        feature_dim=3,
        assign_uids=True,
        seed=seed,
    )


PRESETS = {
    "threshold_push": (_threshold_push, 7),
    "fold_target": (_fold_target, 11),
    "mirror_symmetric": (_mirror_symmetric, 3),
    "unique_id_vacuity": (_unique_id_vacuity, 5),
}


def scenario_interval_concentration(name: str, seed: int | None = None) -> ScenarioConfig:
    """Named, versioned scenario config. ``seed`` overrides the preset default."""
    if name not in PRESETS:
        raise UnknownPreset(f"unknown preset {name!r}; known: {sorted(PRESETS)}")
    build, default_seed = PRESETS[name]
    return build(default_seed if seed is None else seed)


def preset(name: str, seed: int | None = None) -> ScoredPopulation:
    return generate(scenario_interval_concentration(name, seed))


__all__ = [
    "RNG_NAME", "Uniform", "Normal", "PointMass", "Mixture", "CopyOf", "GroupSpec",
    "ConcentrationTarget", "ScenarioConfig", "generate", "generate_with_seed",
    "scenario_interval_concentration", "preset", "PRESETS",
]
