"""Two degenerate choices of the individual metric.

With the trivial metric every pair is "identical", so only constant
predictors are fair. With the discrete metric on unique identifiers every
pair is maximally different, so every predictor with a bounded output
metric is fair and the audit says nothing.

Run: python3 demos/02_degenerate_metrics.py
"""
import numpy as np

from ifgerry import AuditConfig, PseudoMetricSpec, apply_predictor, audit_if, generate, scenario_interval_concentration

sp = generate(scenario_interval_concentration("unique_id_vacuity"))
pop = sp.population
rng = np.random.default_rng(0)

trivial = AuditConfig(PseudoMetricSpec("trivial"), PseudoMetricSpec("euclidean", "score-space"))
print("trivial d, generated scores:", audit_if(sp, trivial).passed)
print("trivial d, constant scores: ", audit_if(sp.with_scores(np.full(len(pop.ids), 0.7)), trivial).passed)

for D in (PseudoMetricSpec("discrete", "score-space"), PseudoMetricSpec("capped_euclidean", "score-space", cap=1.0)):
    cfg = AuditConfig(PseudoMetricSpec("discrete", "uid-space"), D)
    wild = [audit_if(apply_predictor(pop, dict(zip(pop.ids, rng.normal(0, 1e6, len(pop.ids))))), cfg).passed
            for _ in range(20)]
    print(f"uid d with D={D.kind}: {sum(wild)}/20 arbitrary predictors pass")
