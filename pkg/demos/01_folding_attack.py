"""A fold turns the region just above a threshold into the region just below it.

Run: python3 demos/01_folding_attack.py
"""
import numpy as np

from ifgerry import (
    AuditConfig,
    Folding,
    PseudoMetricSpec,
    Threshold,
    apply_to_scored,
    audit_if,
    check_nonexpansive,
    generate,
    scenario_interval_concentration,
    selection_rates,
)

cfg = scenario_interval_concentration("fold_target")
sp = generate(cfg)
t = Threshold(3.0)
audit = AuditConfig(PseudoMetricSpec("euclidean"), PseudoMetricSpec("euclidean", "score-space"))

print("fold_target population:", len(sp.population), "individuals")
print("fair before attack:", audit_if(sp, audit).passed)

# Scores in [3, 3.6] land in [2.4, 3]; everything above 3.6 shifts down by 1.2.
phi = Folding(3.0, 3.6)
report = check_nonexpansive(phi, float(sp.score_array.min()), float(sp.score_array.max()))
print(f"fold non-expansive on score range: {report.passed} (max ratio {report.max_ratio:.6f})")

after = apply_to_scored(phi, sp)
print("fair after attack:", audit_if(after, audit).passed)

for label, st in (("before", selection_rates(sp, t)), ("after", selection_rates(after, t))):
    rates = ", ".join(f"{g}={st.rate(g):.3f}" for g in sorted(st.per_group))
    print(f"{label:>6}: {rates}  spd={st.spd:.3f}")

x = np.array([4.0, 2.0, 0.5, 3.0, 1.0])
print("Folding(1, 3) on", x.tolist(), "->", Folding(1, 3).apply(x).tolist())
