from tailbound.analytics.compaction import CompactionReport, estimate_alpha, mean_tail_curve
from tailbound.analytics.metrics import recall_at_k, relative_contrast
from tailbound.analytics.pareto import pareto_denoise, pareto_frontier, speedup_at_recall
from tailbound.analytics.theory import (
    dkw_confidence,
    effective_alpha,
    empirical_constant,
    expected_cost_fraction,
    expected_speedup,
    margin,
    normal_quantile,
    pruning_dimension,
    threshold_bounds,
    uniform_epsilon,
)

__all__ = [
    "CompactionReport",
    "dkw_confidence",
    "effective_alpha",
    "empirical_constant",
    "estimate_alpha",
    "expected_cost_fraction",
    "expected_speedup",
    "margin",
    "mean_tail_curve",
    "normal_quantile",
    "pareto_denoise",
    "pareto_frontier",
    "pruning_dimension",
    "recall_at_k",
    "relative_contrast",
    "speedup_at_recall",
    "threshold_bounds",
    "uniform_epsilon",
]
