"""Search for the non-expansive score map that best serves a biased objective.

The attacker loses one unit per selected member of group A and gains one
per selected member of group B. Every candidate map is non-expansive, so the
attacked predictor stays individually fair while group rates move a lot.

Run: python3 demos/04_gerrymander_search.py
"""
import json

from ifgerry import AuditConfig, PseudoMetricSpec, Threshold, UtilitySpec, generate, scenario_interval_concentration, search_attack
from ifgerry.search import FAMILIES

cfg = scenario_interval_concentration("threshold_push")
sp = generate(cfg)
u = UtilitySpec(Threshold(cfg.params["t"]), {"A": -1.0, "B": 1.0})
audit = AuditConfig(PseudoMetricSpec("euclidean"), PseudoMetricSpec("euclidean", "score-space"))

res = search_attack(sp, u, FAMILIES, 32, audit)
print("winner:", json.dumps(res.best_transform.to_json()))
print(f"utility {res.baseline_utility} -> {res.best_utility}")
print(f"audit before/after: {res.audit_before_passed}/{res.audit_passed}")
b, a = res.group_stats_before, res.group_stats_after
for g in sorted(b.per_group):
    print(f"group {g}: rate {b.rate(g):.3f} -> {a.rate(g):.3f}")
print(f"spd {b.spd:.3f} -> {a.spd:.3f}")
print(f"candidates evaluated={res.candidates_evaluated} rejected={res.candidates_rejected}")
