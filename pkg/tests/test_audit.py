from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ifgerry.aif import DistributionTable
from ifgerry.audit import (
    AuditConfig,
    LeibnizTable,
    audit_if,
    interval_concentration,
    leibniz_audit,
    selection_rates,
)
from ifgerry.core import Individual, Population, Threshold, apply_predictor, make_population
from ifgerry.errors import InputError, MissingIndividual, MissingUid, OutcomeSetMismatch
from ifgerry.metrics import PseudoMetricSpec, eval_metric
from ifgerry.transforms import ConstantCollapse, Reflection, apply_to_scored

EUC_D = PseudoMetricSpec("euclidean", "score-space")
CAP_D = PseudoMetricSpec("capped_euclidean", "score-space", cap=1.0)
DISC_D = PseudoMetricSpec("discrete", "score-space")
TRIVIAL = PseudoMetricSpec("trivial")
UID = PseudoMetricSpec("discrete", "uid-space")
EUC = PseudoMetricSpec("euclidean")


def brute_audit(sp, cfg):
    """Double loop over individuals, no vectorization."""
    inds = sp.population.individuals
    bad = set()
    for i, p in enumerate(inds):
        for q in inds[i + 1:]:
            d = eval_metric(cfg.d_spec, p, q)
            D = eval_metric(cfg.D_spec, sp.scores[p.id], sp.scores[q.id])
            if D > d + cfg.slack:
                bad.add(tuple(sorted((p.id, q.id))))
    return bad


def random_sp(rng, n, dim=2, uids=True, groups=("A", "B")):
    inds = [
        Individual(f"i{k:03d}", groups[k % len(groups)], tuple(rng.uniform(0, 1, dim)), f"u{k}" if uids else None)
        for k in range(n)
    ]
    pop = Population(tuple(inds), dim)
    return pop


def test_constant_collapse_passes_everything():
    rng = np.random.default_rng(0)
    pop = random_sp(rng, 30)
    sp = apply_predictor(pop, {i: float(rng.normal()) for i in pop.ids})
    flat = apply_to_scored(ConstantCollapse(0.3), sp)
    for d in (TRIVIAL, UID, EUC):
        for D in (EUC_D, CAP_D, DISC_D):
            assert audit_if(flat, AuditConfig(d, D)).passed


def test_trivial_metric_two_scores():
    pop = make_population([("p", "A", (0.0,)), ("q", "B", (0.0,))])
    rep = audit_if(apply_predictor(pop, {"p": 0.0, "q": 1.0}), AuditConfig(TRIVIAL, EUC_D))
    assert not rep.passed
    assert rep.violations == [("p", "q", 0.0, 1.0)]
    assert rep.n_pairs == 1


def test_unique_uid_vacuity():
    rng = np.random.default_rng(4)
    pop = random_sp(rng, 100)
    sp = apply_predictor(pop, {i: float(rng.normal(0, 100)) for i in pop.ids})
    assert audit_if(sp, AuditConfig(UID, CAP_D)).passed


def test_missing_uid():
    pop = make_population([("p", "A", (0.0,), "u1"), ("q", "B", (0.0,))])
    with pytest.raises(MissingUid):
        audit_if(apply_predictor(pop, {"p": 0.0, "q": 1.0}), AuditConfig(UID, EUC_D))


def test_config_domains():
    with pytest.raises(InputError):
        AuditConfig(EUC_D, EUC_D)
    with pytest.raises(InputError):
        AuditConfig(EUC, EUC)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 40), st.sampled_from([EUC, TRIVIAL, UID,
       PseudoMetricSpec("weighted_lp", p=1, weights=(0.5, 2.0))]), st.sampled_from([EUC_D, CAP_D, DISC_D]))
def test_audit_matches_brute_force(seed, n, d, D):
    rng = np.random.default_rng(seed)
    pop = random_sp(rng, n)
    sp = apply_predictor(pop, {i: float(rng.normal(0, 0.5)) for i in pop.ids})
    cfg = AuditConfig(d, D)
    rep = audit_if(sp, cfg)
    assert {(p, q) for p, q, _, _ in rep.violations} == brute_audit(sp, cfg)
    assert rep.passed == (not rep.violations)
    assert all(Dv > dv + cfg.slack for _, _, dv, Dv in rep.violations)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_audit_order_independent(seed):
    rng = np.random.default_rng(seed)
    pop = random_sp(rng, 25)
    scores = {i: float(rng.normal(0, 0.5)) for i in pop.ids}
    perm = rng.permutation(len(pop))
    pop2 = Population(tuple(pop.individuals[k] for k in perm), pop.feature_dim)
    cfg = AuditConfig(EUC, EUC_D)
    assert audit_if(apply_predictor(pop, scores), cfg) == audit_if(apply_predictor(pop2, scores), cfg)


def test_audit_block_boundary():
    # exercise more than one row block of the vectorized loop
    rng = np.random.default_rng(2)
    pop = random_sp(rng, 600, dim=1)
    sp = apply_predictor(pop, {ind.id: 0.5 * ind.features[0] for ind in pop})
    assert audit_if(sp, AuditConfig(EUC, EUC_D)).passed
    sp2 = sp.with_scores(list(sp.score_array[:-1]) + [50.0])
    rep = audit_if(sp2, AuditConfig(EUC, EUC_D))
    assert len(rep.violations) == 599
    assert rep.n_pairs == 600 * 599 // 2


def test_slack():
    pop = make_population([("p", "A", (0.0,)), ("q", "B", (1.0,))])
    sp = apply_predictor(pop, {"p": 0.0, "q": 1.0 + 5e-13})
    rep = audit_if(sp, AuditConfig(EUC, EUC_D))
    assert rep.passed and 0 < rep.max_slack_used <= 1e-12
    assert not audit_if(sp, AuditConfig(EUC, EUC_D, slack=0.0)).passed


# -- group statistics ------------------------------------------------------

def _groups_sp(scores_by_group):
    rows, scores = [], {}
    for g, vals in scores_by_group.items():
        for k, v in enumerate(vals):
            rows.append((f"{g}{k}", g, ()))
            scores[f"{g}{k}"] = v
    return apply_predictor(make_population(rows), scores)


def test_selection_rates_by_hand():
    sp = _groups_sp({"A": [1, 3], "B": [3, 4, 5, 1]})
    st_ = selection_rates(sp, Threshold(2))
    assert st_.rate("A") == 0.5
    assert st_.rate("B") == 0.75
    assert st_.per_group["B"].positives == 3
    assert st_.spd == 0.25


def test_all_below_threshold():
    st_ = selection_rates(_groups_sp({"A": [0, 1], "B": [1.5]}), Threshold(2))
    assert st_.rate("A") == st_.rate("B") == 0.0 and st_.spd == 0.0


def test_below_direction():
    st_ = selection_rates(_groups_sp({"A": [1, 3], "B": [3, 4, 5, 1]}), Threshold(2, "below"))
    assert st_.rate("A") == 0.5 and st_.rate("B") == 0.25


def test_reflection_at_threshold():
    t = 2.0
    sp = _groups_sp({"A": [t, t + 1]})
    after = apply_to_scored(Reflection(t), sp)
    assert dict(after.scores) == {"A0": t, "A1": t - 1}
    pos = Threshold(t).positive(after.score_array)
    assert list(pos) == [True, False]


def test_interval_concentration_by_hand():
    # 4 of A and 1 of B inside [0, 1]; overall 5 A of 10
    sp = _groups_sp({"A": [0.1, 0.2, 0.3, 0.4, 5.0], "B": [0.5, 6, 7, 8, 9]})
    rec = interval_concentration(sp, 0.0, 1.0, "A")
    assert rec.fraction_of_interval == 0.8
    assert rec.base_rate == 0.5
    assert rec.overrepresentation_ratio == pytest.approx(1.6)


def test_interval_concentration_empty_and_degenerate():
    sp = _groups_sp({"A": [1.0, 2.0], "B": [3.0]})
    rec = interval_concentration(sp, 10.0, 11.0, "A")
    assert rec.empty and rec.fraction_of_interval is None and rec.overrepresentation_ratio is None
    assert interval_concentration(sp, 0.0, 2.5, "A").fraction_of_interval == 1.0
    with pytest.raises(InputError):
        interval_concentration(sp, 1.0, 1.0, "A")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30), st.floats(-10, 10))
def test_collapse_has_zero_spd(vals, t):
    sp = _groups_sp({"A": vals, "B": vals[::-1] + [0.0]})
    st_ = selection_rates(apply_to_scored(ConstantCollapse(1.0), sp), Threshold(t))
    assert st_.spd == 0.0
    assert {r.selection_rate for r in st_.per_group.values()} <= {0.0, 1.0}


# -- Leibniz ---------------------------------------------------------------

def _table(cls=DistributionTable, **rows):
    return cls(("y0", "y1"), rows)


def test_leibniz_identical():
    t = _table(LeibnizTable, x1=[F(1, 3), F(2, 3)], x2=[1, 0])
    assert leibniz_audit(_table(x1=[F(1, 3), F(2, 3)], x2=[1, 0]), t).passed


def test_leibniz_mismatch():
    t = _table(LeibnizTable, x1=[F(1, 3), F(2, 3)], x2=[1, 0])
    res = leibniz_audit(_table(x1=[F(1, 3), F(2, 3)], x2=[F(999, 1000), F(1, 1000)]), t)
    assert not res.passed and res.mismatches == ["x2"]


def test_leibniz_missing_and_outcome_mismatch():
    t = _table(LeibnizTable, x1=[1, 0], x2=[0, 1])
    with pytest.raises(MissingIndividual):
        leibniz_audit(_table(x1=[1, 0]), t)
    with pytest.raises(OutcomeSetMismatch):
        leibniz_audit(DistributionTable(("y1", "y0"), {"x1": [1, 0], "x2": [0, 1]}), t)


def test_leibniz_ignores_unspecified_individuals():
    t = _table(LeibnizTable, x1=[1, 0])
    assert leibniz_audit(_table(x1=[1, 0], x9=[0, 1]), t).passed
