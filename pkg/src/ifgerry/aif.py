"""Absolute individual fairness on finite, discrete instances.

Conditional distributions are stored as exact rationals so that "same
distribution" is a true equivalence relation. The minimal sufficient statistic
of a finite discrete table is represented by the partition it induces: the
classes of individuals with identical rows.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import InvalidDistribution, UniverseMismatch


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, float):
        raise InvalidDistribution(f"floats are not accepted as probabilities: {x!r}")
    return Fraction(x)


@dataclass(frozen=True)
class DistributionTable:
    """Per-individual distributions over a shared, ordered outcome set."""

    outcome_labels: tuple[str, ...]
    per_id: Mapping[str, tuple[Fraction, ...]]

    def __post_init__(self):
        labels = tuple(self.outcome_labels)
        if len(set(labels)) != len(labels):
            raise InvalidDistribution("outcome labels must be distinct")
        object.__setattr__(self, "outcome_labels", labels)
        rows = {}
        for id_, row in self.per_id.items():
            try:
                vec = tuple(_to_fraction(x) for x in row)
            except (ValueError, ZeroDivisionError, TypeError) as exc:
                raise InvalidDistribution(f"row {id_!r}: {exc}") from None
            if len(vec) != len(labels):
                raise InvalidDistribution(
                    f"row {id_!r} has {len(vec)} entries for {len(labels)} outcomes"
                )
            if any(p < 0 for p in vec):
                raise InvalidDistribution(f"row {id_!r} has a negative probability")
            if sum(vec) != 1:
                raise InvalidDistribution(f"row {id_!r} sums to {sum(vec)}, not 1")
            rows[id_] = vec
        object.__setattr__(self, "per_id", rows)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.per_id)

    def __getitem__(self, id_) -> tuple[Fraction, ...]:
        return self.per_id[id_]

    def to_json(self) -> dict:
        return {
            "outcomes": list(self.outcome_labels),
            "rows": {
                id_: [[str(p.numerator), str(p.denominator)] for p in row]
                for id_, row in self.per_id.items()
            },
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "DistributionTable":
        try:
            return cls(tuple(obj["outcomes"]), dict(obj["rows"]))
        except (KeyError, TypeError) as exc:
            raise InvalidDistribution(f"malformed distribution table: {exc}") from None


class Partition:
    """A set partition of a finite id universe."""

    __slots__ = ("blocks", "universe", "_block_of")

    def __init__(self, blocks: Iterable[Iterable[str]]):
        fb = frozenset(frozenset(b) for b in blocks)
        block_of = {}
        for b in fb:
            if not b:
                raise ValueError("partition blocks must be non-empty")
            for x in b:
                if x in block_of:
                    raise ValueError(f"{x!r} appears in more than one block")
                block_of[x] = b
        self.blocks = fb
        self.universe = frozenset(block_of)
        self._block_of = block_of

    def block_of(self, x) -> frozenset:
        return self._block_of[x]

    def __eq__(self, other):
        return isinstance(other, Partition) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __repr__(self):
        inner = ", ".join("{" + ", ".join(sorted(b)) + "}" for b in sorted(self.blocks, key=sorted))
        return f"Partition({inner})"

    def to_json(self) -> list:
        return sorted(sorted(b) for b in self.blocks)


def partition_by_distribution(table: DistributionTable) -> Partition:
    """Group ids whose rows are exactly equal.

    For a finite discrete table this is the partition induced by the minimal
    sufficient statistic.
    """
    classes: dict[tuple, list[str]] = defaultdict(list)
    for id_, row in table.per_id.items():
        classes[row].append(id_)
    return Partition(classes.values())


def is_coarsening(coarse: Partition, fine: Partition) -> bool:
    """True iff every block of ``fine`` lies inside a single block of ``coarse``."""
    if coarse.universe != fine.universe:
        raise UniverseMismatch("partitions are over different universes")
    for block in fine.blocks:
        it = iter(block)
        home = coarse.block_of(next(it))
        if not block <= home:
            return False
    return True


@dataclass(frozen=True)
class AIFVerdict:
    fair: bool
    witness: tuple[str, str] | None = None

    def __bool__(self):
        return self.fair


def _same_universe(fY: DistributionTable, fYhat: DistributionTable):
    if set(fY.per_id) != set(fYhat.per_id):
        raise UniverseMismatch("ground-truth and prediction tables cover different individuals")


def check_aif_direct(fY: DistributionTable, fYhat: DistributionTable) -> AIFVerdict:
    """Pairwise check: equal ground-truth rows must get equal prediction rows.

    Returns the first violating pair (in table order) as witness.
    """
    _same_universe(fY, fYhat)
    y, yh = fY.per_id, fYhat.per_id
    for p, q in combinations(fY.per_id, 2):
        if y[p] == y[q] and yh[p] != yh[q]:
            return AIFVerdict(False, (p, q))
    return AIFVerdict(True)


def check_aif_via_mss(fY: DistributionTable, fYhat: DistributionTable) -> bool:
    """Same property, decided by comparing the two induced partitions."""
    _same_universe(fY, fYhat)
    return is_coarsening(partition_by_distribution(fYhat), partition_by_distribution(fY))


def table_from_rows(outcomes: Sequence[str], rows: Mapping[str, Sequence]) -> DistributionTable:
    return DistributionTable(tuple(outcomes), dict(rows))
