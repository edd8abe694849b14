"""Metrics, cross-validation, experiments, reports and the synthetic fixture"""

from src.evaluation.metrics import Metrics, pooled, positive_class_metrics
from src.evaluation.cross_validation import (
    DEFAULT_ALPHAS,
    DEFAULT_KS,
    CvReport,
    FoldResult,
    GridPoint,
    GridSpec,
    cross_validate,
)
from src.evaluation.experiments import (
    Baseline,
    TTestResult,
    ablate,
    baseline_config,
    evaluate_by_topic,
    paired_t_test,
    partition_sweep,
    positive_fraction_sweep,
    run_baseline,
)

__all__ = [
    'Metrics',
    'pooled',
    'positive_class_metrics',
    'DEFAULT_ALPHAS',
    'DEFAULT_KS',
    'CvReport',
    'FoldResult',
    'GridPoint',
    'GridSpec',
    'cross_validate',
    'Baseline',
    'TTestResult',
    'ablate',
    'baseline_config',
    'evaluate_by_topic',
    'paired_t_test',
    'partition_sweep',
    'positive_fraction_sweep',
    'run_baseline',
]
