"""Individual-fairness audits and IF-preserving gerrymandering attacks on finite populations."""
from .aif import (
    DistributionTable,
    Partition,
    check_aif_direct,
    check_aif_via_mss,
    is_coarsening,
    partition_by_distribution,
)
from .audit import (
    AuditConfig,
    AuditReport,
    GroupStats,
    LeibnizTable,
    audit_if,
    interval_concentration,
    leibniz_audit,
    selection_rates,
)
from .core import Individual, Population, ScoredPopulation, Threshold, apply_predictor
from .metrics import PseudoMetricSpec, eval_metric, validate_pseudometric
from .search import AttackResult, UtilitySpec, candidate_grid, search_attack, utility
from .synth import ScenarioConfig, generate, scenario_interval_concentration
from .transforms import (
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
    isometry_check,
)

__version__ = "0.1.0"
