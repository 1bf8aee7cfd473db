"""Individuals, populations and point predictors.

Everything here is immutable after construction. Populations are finite and
fully materialized so that every fairness check can be exhaustive.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateId,
    InputError,
    MissingScore,
    NonFiniteScore,
    UnknownId,
)

AT_OR_ABOVE = "at_or_above"
BELOW = "below"
_DIRECTIONS = (AT_OR_ABOVE, BELOW)


@dataclass(frozen=True)
class Individual:
    id: str
    group: str
    features: tuple[float, ...] = ()
    uid: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(float(x) for x in self.features))
        if self.uid == "":
            object.__setattr__(self, "uid", None)


@dataclass(frozen=True)
class Population:
    individuals: tuple[Individual, ...]
    feature_dim: int = field(default=-1)

    def __post_init__(self):
        inds = tuple(self.individuals)
        object.__setattr__(self, "individuals", inds)
        dim = self.feature_dim
        if dim < 0:
            dim = len(inds[0].features) if inds else 0
            object.__setattr__(self, "feature_dim", dim)
        seen: set[str] = set()
        uids: set[str] = set()
        for ind in inds:
            if ind.id in seen:
                raise DuplicateId(f"duplicate individual id {ind.id!r}")
            seen.add(ind.id)
            if len(ind.features) != dim:
                raise DimensionMismatch(
                    f"individual {ind.id!r} has {len(ind.features)} features, expected {dim}"
                )
            if ind.uid is not None:
                if ind.uid in uids:
                    raise DuplicateId(f"duplicate uid {ind.uid!r}")
                uids.add(ind.uid)

    def __len__(self):
        return len(self.individuals)

    def __iter__(self):
        return iter(self.individuals)

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(ind.id for ind in self.individuals)

    @cached_property
    def groups(self) -> tuple[str, ...]:
        """Distinct group labels, sorted."""
        return tuple(sorted({ind.group for ind in self.individuals}))

    @cached_property
    def group_array(self) -> np.ndarray:
        return np.array([ind.group for ind in self.individuals], dtype=object)

    @cached_property
    def feature_matrix(self) -> np.ndarray:
        return np.array([ind.features for ind in self.individuals], dtype=float).reshape(
            len(self.individuals), self.feature_dim
        )


@dataclass(frozen=True)
class ScoredPopulation:
    """A population together with the real-valued output of a point predictor."""

    population: Population
    scores: Mapping[str, float]

    def __post_init__(self):
        ids = set(self.population.ids)
        for id_ in self.scores:
            if id_ not in ids:
                raise UnknownId(id_)
        clean = {}
        for id_ in self.population.ids:
            if id_ not in self.scores:
                raise MissingScore(id_)
            try:
                value = float(self.scores[id_])
            except (TypeError, ValueError):
                raise NonFiniteScore(id_, self.scores[id_]) from None
            if not math.isfinite(value):
                raise NonFiniteScore(id_, value)
            clean[id_] = value
        object.__setattr__(self, "scores", MappingProxyType(clean))

    def __len__(self):
        return len(self.population)

    @cached_property
    def score_array(self) -> np.ndarray:
        """Scores in population order."""
        return np.array([self.scores[i] for i in self.population.ids], dtype=float)

    def with_scores(self, values: Sequence[float]) -> "ScoredPopulation":
        if len(values) != len(self.population):
            raise DimensionMismatch("score vector length differs from population size")
        return ScoredPopulation(self.population, dict(zip(self.population.ids, values)))


@dataclass(frozen=True)
class Threshold:
    t: float
    direction: str = AT_OR_ABOVE

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise InputError(f"threshold must be finite, got {self.t!r}")
        if self.direction not in _DIRECTIONS:
            raise InputError(f"unknown threshold direction {self.direction!r}")

    def positive(self, scores):
        """Boolean mask (or bool) of the favorable class."""
        scores = np.asarray(scores, dtype=float)
        if self.direction == AT_OR_ABOVE:
            return scores >= self.t
        return scores < self.t

    def to_json(self) -> dict:
        return {"t": self.t, "direction": self.direction}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Threshold":
        return cls(float(obj["t"]), obj.get("direction", AT_OR_ABOVE))


def apply_predictor(population: Population, scores_by_id: Mapping[str, float]) -> ScoredPopulation:
    """Attach scores to ``population``, rejecting missing, unknown or non-finite entries."""
    return ScoredPopulation(population, dict(scores_by_id))


# -- flat-file I/O -----------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def population_to_csv(population: Population) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "group", "uid"] + [f"f{k + 1}" for k in range(population.feature_dim)])
    for ind in population:
        w.writerow([ind.id, ind.group, ind.uid or ""] + [_fmt(x) for x in ind.features])
    return buf.getvalue()


def population_from_csv(text: str) -> Population:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InputError("empty population file")
    header = [h.strip() for h in rows[0]]
    if header[:3] != ["id", "group", "uid"]:
        raise InputError(f"population header must start with id,group,uid; got {header[:3]}")
    dim = len(header) - 3
    inds = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != dim + 3:
            raise DimensionMismatch(f"line {lineno}: expected {dim + 3} fields, got {len(row)}")
        try:
            feats = tuple(float(x) for x in row[3:])
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
        inds.append(Individual(row[0], row[1], feats, row[2] or None))
    return Population(tuple(inds), dim)


def scores_to_csv(sp: ScoredPopulation) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "score"])
    for id_ in sp.population.ids:
        w.writerow([id_, _fmt(sp.scores[id_])])
    return buf.getvalue()


def scores_from_csv(text: str) -> dict[str, float]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [h.strip() for h in rows[0]] != ["id", "score"]:
        raise InputError("scores header must be id,score")
    out: dict[str, float] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise InputError(f"line {lineno}: expected 2 fields")
        if row[0] in out:
            raise DuplicateId(f"duplicate score row for {row[0]!r}")
        try:
            out[row[0]] = float(row[1])
        except ValueError:
            raise NonFiniteScore(row[0], row[1]) from None
    return out


def make_population(rows: Iterable[tuple]) -> Population:
    """Convenience constructor from ``(id, group, features[, uid])`` tuples."""
    return Population(tuple(Individual(*r) for r in rows))
