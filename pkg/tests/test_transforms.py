import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from ifgerry.core import make_population, apply_predictor
from ifgerry.errors import InvalidDomain, InvalidTransform, NonFiniteInput
from ifgerry.transforms import (
    Composition,
    ConstantCollapse,
    Contraction,
    Folding,
    LocalContraction,
    Reflection,
    ScoreTransform,
    Translation,
    apply_to_scored,
    apply_transform,
    check_nonexpansive,
    fold_case_points,
    isometry_check,
    transform_from_json,
)


class Doubling(ScoreTransform):
    kind = "double"

    def apply(self, y):
        return 2.0 * np.asarray(y, dtype=float)


def fold_oracle(x, a, b):
    """Scalar transcription of the piecewise folding definition."""
    if x > b:
        return x - 2 * (b - a)
    if a <= x <= b:
        return -x + 2 * a
    return x


finite = st.floats(-1e3, 1e3)


def test_fold_exact_values():
    phi = Folding(1, 3)
    assert [phi(x) for x in (4, 2, 0.5, 3, 1)] == [0.0, 0.0, 0.5, -1.0, 1.0]


def test_reflection_fixes_center():
    assert Reflection(2.75)(2.75) == 2.75


def test_translation():
    assert Translation(2)(5) == 7


def test_local_contraction_values():
    phi = LocalContraction(0, 2, 1)
    assert [phi(x) for x in (-1, 1.5, 3)] == [0.0, 1.0, 2.0]


def test_non_finite_input():
    with pytest.raises(NonFiniteInput):
        apply_transform(Translation(1.0), math.nan)


@pytest.mark.parametrize(
    "make",
    [
        lambda: Contraction(1.0),
        lambda: Contraction(-0.1),
        lambda: LocalContraction(2, 1, 1.5),
        lambda: LocalContraction(0, 2, 3),
        lambda: Folding(3, 3),
        lambda: Folding(3, 1),
        lambda: Composition(()),
        lambda: Translation(math.inf),
    ],
)
def test_invariants_rejected(make):
    with pytest.raises(InvalidTransform):
        make()


@pytest.fixture
def sp():
    pop = make_population([("p", "A", ()), ("q", "A", ()), ("r", "B", ())])
    return apply_predictor(pop, {"p": 4.0, "q": 2.0, "r": 0.5})


def test_collapse_on_population(sp):
    assert set(apply_to_scored(ConstantCollapse(0.0), sp).scores.values()) == {0.0}


def test_inverse_translations_are_identity(sp):
    out = apply_to_scored(Composition((Translation(1), Translation(-1))), sp)
    assert dict(out.scores) == dict(sp.scores)


def test_fold_on_population(sp):
    assert dict(apply_to_scored(Folding(1, 3), sp).scores) == {"p": 0.0, "q": 0.0, "r": 0.5}


def test_composition_is_left_to_right():
    phi = Composition((Translation(1.0), Contraction(0.5, 0.0)))
    assert phi(3.0) == 2.0


@settings(max_examples=300)
@given(finite, finite, finite)
def test_fold_matches_scalar_oracle(x, a, w):
    assume(w > 1e-6)
    assert Folding(a, a + w)(x) == fold_oracle(x, a, a + w)


@settings(max_examples=300)
@given(finite, finite, finite, finite)
def test_fold_nonexpansive_property(p, q, a, w):
    assume(w > 1e-6)
    b = a + w
    assert abs(fold_oracle(p, a, b) - fold_oracle(q, a, b)) <= abs(p - q) + 1e-9


@settings(max_examples=200)
@given(finite, finite, finite, finite)
def test_fold_piece_structure(a, w, u, v):
    assume(w > 1e-3)
    b = a + w
    phi = Folding(a, b)
    # inside: order reversed
    p, q = a + w * min(abs(u), abs(v)) / 1e3, a + w * max(abs(u), abs(v)) / 1e3
    if a <= p < q <= b:
        assert phi(p) > phi(q)
    # above: pure translation; below: identity
    hi1, hi2 = b + abs(u) + 1, b + abs(v) + 1
    assert phi(hi1) - phi(hi2) == pytest.approx(hi1 - hi2, abs=1e-9)
    lo = a - abs(u) - 1
    assert phi(lo) == lo


def test_fold_continuous_at_endpoints():
    phi = Folding(-1.5, 2.0)
    for c in (-1.5, 2.0):
        assert phi(c) == pytest.approx(phi(np.nextafter(c, -np.inf)), abs=1e-12)
        assert phi(c) == pytest.approx(phi(np.nextafter(c, np.inf)), abs=1e-12)


def test_fold_case_points_cover_six_cases():
    a, b = 1.0, 3.0
    pts = fold_case_points(a, b)
    region = lambda x: 0 if x < a else (1 if x <= b else 2)
    cases = {tuple(sorted((region(p), region(q)))) for p in pts for q in pts if p != q}
    assert cases == {(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)}


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("ab", [(1.0, 3.0), (-50.0, -49.9), (-10.0, 80.0)])
def test_check_nonexpansive_fold(seed, ab):
    rep = check_nonexpansive(Folding(*ab), -100, 100, 5000, seed)
    assert rep.passed and rep.violations == []
    assert rep.max_ratio <= 1.0 + 1e-12


def test_check_nonexpansive_catches_doubling():
    rep = check_nonexpansive(Doubling(), -1, 1, 10, 0, boundary_points=[0.0, 0.5])
    assert not rep.passed
    p, q, num, den = rep.violations[0]
    assert num == pytest.approx(2 * den)


def test_contraction_ratio():
    rep = check_nonexpansive(Contraction(0.5, 0.0), -10, 10, 1000, 3)
    assert rep.passed
    assert rep.max_ratio == pytest.approx(0.5)


def test_check_nonexpansive_domain():
    with pytest.raises(InvalidDomain):
        check_nonexpansive(Translation(0.0), 1.0, 1.0, 10, 0)
    with pytest.raises(InvalidDomain):
        check_nonexpansive(Translation(0.0), 0.0, 1.0, 0, 0)


def test_check_nonexpansive_deterministic():
    a = check_nonexpansive(Folding(0, 1), -5, 5, 200, 9)
    b = check_nonexpansive(Folding(0, 1), -5, 5, 200, 9)
    assert a == b


def test_isometries():
    rng = np.random.default_rng(1)
    pairs = rng.uniform(-100, 100, size=(1000, 2))
    assert isometry_check(Translation(-7.25), pairs)
    assert isometry_check(Reflection(3.0), pairs)
    assert not isometry_check(Contraction(0.5, 0.0), [(0.0, 1.0)])
    assert not isometry_check(Folding(0.0, 1.0), [(-1.0, 2.0)])


@st.composite
def transforms(draw, depth=2):
    kind = draw(st.sampled_from(["t", "r", "c", "k", "l", "f"] + (["o"] if depth else [])))
    x = st.floats(-50, 50)
    if kind == "t":
        return Translation(draw(x))
    if kind == "r":
        return Reflection(draw(x))
    if kind == "c":
        return Contraction(draw(st.floats(0, 0.99)), draw(x))
    if kind == "k":
        return ConstantCollapse(draw(x))
    if kind == "l":
        t = draw(x)
        w = draw(st.floats(0.01, 20))
        return LocalContraction(t, t + w, t + w * draw(st.floats(0, 1)))
    if kind == "f":
        a = draw(x)
        return Folding(a, a + draw(st.floats(0.01, 20)))
    return Composition(tuple(draw(st.lists(transforms(depth=depth - 1), min_size=1, max_size=3))))


@settings(max_examples=150, deadline=None)
@given(transforms())
def test_every_shipped_transform_is_nonexpansive(phi):
    assert check_nonexpansive(phi, -100, 100, 500, 0).passed


@settings(max_examples=150, deadline=None)
@given(transforms())
def test_json_round_trip(phi):
    assert transform_from_json(phi.to_json()) == phi


def test_json_errors():
    with pytest.raises(InvalidTransform):
        transform_from_json({"kind": "fold", "a": 3.0, "b": 1.0})
    with pytest.raises(InvalidTransform):
        transform_from_json({"kind": "warp"})
    with pytest.raises(InvalidTransform):
        transform_from_json({"kind": "translate"})
