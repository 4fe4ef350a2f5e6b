"""Classifier-error-aware measurement of class-probability bias.

Generative models are audited by classifying batches of their samples with a
sensitive-attribute classifier and reading off the per-class proportions.
The classifier's own error rates bias those proportions; this package models
the effect, corrects it, and validates the correction with seeded Monte
Carlo simulation and goodness-of-fit testing.
"""

from .api import (
    BaselineEstimator,
    BbseEstimator,
    CleamEstimator,
    MulticlassCleamEstimator,
    check_proportions,
)
from .estimators import (
    ChannelSolveResult,
    baseline_estimate,
    bbse_estimate,
    cleam_interval,
    cleam_point,
    multiclass_estimate,
    sample_stats,
    z_value,
)
from .exceptions import (
    CleamError,
    ConfigError,
    DataError,
    DegenerateClassifierError,
    DegenerateModelError,
    InsufficientSamplesError,
    InvalidInputError,
    MetricUndefinedError,
    SingularChannelError,
)
from .metrics import (
    diversity_to_phat,
    fairness_discrepancy,
    fd_to_class_prob,
    format_percent,
    gt_diversity,
    interval_error,
    point_error,
    relative_improvement,
)
from .model import (
    BoundaryBiasWarning,
    covariance_matrix,
    event_probabilities,
    multiclass_forward,
    phat_distribution,
    phat_variance_candidates,
)
from .simulator import (
    DEFAULT_SCENARIO,
    BatchObservation,
    GridResult,
    ScenarioConfig,
    ScenarioResult,
    coverage_experiment,
    evaluate_estimator,
    run_grid,
    run_scenario,
    simulate_batch,
    simulate_phat_series,
    simulate_proportion_matrix,
    substream,
)
from .types import (
    AccuracyProfile,
    ClassDistribution,
    ConfusionMatrix,
    EstimateReport,
    EventProbabilities,
    GaussianSpec,
    IntervalEstimate,
    PhatSeries,
    PointEstimate,
    SampleStats,
)
from .validation import (
    KsResult,
    StatComparison,
    VarianceOracleResult,
    compare_sample_vs_model,
    ks_critical_value,
    ks_test,
    qq_points,
    variance_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyProfile",
    "BaselineEstimator",
    "BatchObservation",
    "BbseEstimator",
    "BoundaryBiasWarning",
    "ChannelSolveResult",
    "ClassDistribution",
    "CleamError",
    "CleamEstimator",
    "ConfigError",
    "ConfusionMatrix",
    "DEFAULT_SCENARIO",
    "DataError",
    "DegenerateClassifierError",
    "DegenerateModelError",
    "EstimateReport",
    "EventProbabilities",
    "GaussianSpec",
    "GridResult",
    "InsufficientSamplesError",
    "IntervalEstimate",
    "InvalidInputError",
    "KsResult",
    "MetricUndefinedError",
    "MulticlassCleamEstimator",
    "PhatSeries",
    "PointEstimate",
    "SampleStats",
    "ScenarioConfig",
    "ScenarioResult",
    "SingularChannelError",
    "StatComparison",
    "VarianceOracleResult",
    "baseline_estimate",
    "bbse_estimate",
    "check_proportions",
    "cleam_interval",
    "cleam_point",
    "compare_sample_vs_model",
    "coverage_experiment",
    "covariance_matrix",
    "diversity_to_phat",
    "evaluate_estimator",
    "event_probabilities",
    "fairness_discrepancy",
    "fd_to_class_prob",
    "format_percent",
    "gt_diversity",
    "interval_error",
    "ks_critical_value",
    "ks_test",
    "multiclass_estimate",
    "multiclass_forward",
    "phat_distribution",
    "phat_variance_candidates",
    "point_error",
    "qq_points",
    "relative_improvement",
    "run_grid",
    "run_scenario",
    "sample_stats",
    "simulate_batch",
    "simulate_phat_series",
    "simulate_proportion_matrix",
    "substream",
    "variance_oracle",
    "z_value",
]
