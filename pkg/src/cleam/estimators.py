"""Point and interval estimators for a generator's class prevalence.

The baseline estimator reports the mean observed batch proportion directly.
The corrected estimators invert the classification channel: in the binary
case the mean classifier output is ``p0*a0 + (1 - p0)*(1 - a1)``, which is
solved for ``p0``; in the multi-class case the full confusion matrix is
inverted at the mean predicted distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .exceptions import (
    DegenerateClassifierError,
    InsufficientSamplesError,
    InvalidInputError,
    SingularChannelError,
)
from .types import (
    AccuracyProfile,
    ClassDistribution,
    ConfusionMatrix,
    IntervalEstimate,
    PhatSeries,
    PointEstimate,
    SampleStats,
)

#: |alpha0 + alpha1 - 1| at or below this is treated as a chance-level classifier.
DEGENERATE_DENOMINATOR_TOL = 1e-9

#: Slack before an inverted estimate is flagged as leaving the simplex.
SIMPLEX_TOL = 1e-6

#: Channels with a larger condition number are refused as numerically singular.
MAX_CONDITION_NUMBER = 1e12


def z_value(confidence: float) -> float:
    """Two-sided standard-normal quantile for the given confidence level."""
    confidence = float(confidence)
    if not 0.0 < confidence < 1.0:
        raise InvalidInputError(f"confidence must lie in (0, 1), got {confidence!r}")
    return NormalDist().inv_cdf(0.5 + confidence / 2.0)


def _stats(values: np.ndarray) -> tuple[float, float, int]:
    values = np.asarray(values, dtype=float)
    s = int(values.size)
    if s < 2:
        raise InsufficientSamplesError(f"at least 2 batch proportions are required, got {s}")
    return float(values.mean()), float(values.std(ddof=1)), s


def sample_stats(series: PhatSeries) -> SampleStats:
    """Sample mean and standard deviation (s - 1 denominator) of the series."""
    mean, std, s = _stats(series.values)
    return SampleStats(mean=mean, std=std, s=s)


def baseline_estimate(series: PhatSeries, confidence: float = 0.95) -> tuple[PointEstimate, IntervalEstimate]:
    """Mean batch proportion with its normal confidence interval.

    The point estimate is the sample mean; the interval is
    mean -/+ z * std / sqrt(s).  No accuracy correction is applied.
    """
    stats = sample_stats(series)
    offset = z_value(confidence) * stats.std / math.sqrt(stats.s)
    point = PointEstimate.from_value(stats.mean)
    return point, IntervalEstimate(stats.mean - offset, stats.mean + offset, confidence)


def _correction_denominator(acc: AccuracyProfile) -> float:
    denominator = acc.correction_denominator()
    if abs(denominator) <= DEGENERATE_DENOMINATOR_TOL:
        raise DegenerateClassifierError(
            "per-class accuracies sum to 1, so the classifier output carries no "
            "information about the true prevalence and the correction is undefined"
        )
    return denominator


def cleam_point_from_mean(mean_phat0: float, acc: AccuracyProfile) -> PointEstimate:
    """Accuracy-corrected point estimate from an already-computed sample mean."""
    denominator = _correction_denominator(acc)
    miss1 = 1.0 - float(acc.alpha[1])
    return PointEstimate.from_value((float(mean_phat0) - miss1) / denominator)


def cleam_point(series: PhatSeries, acc: AccuracyProfile) -> PointEstimate:
    """Accuracy-corrected point estimate of the class-0 prevalence.

    Inverts ``E[phat0] = p0*a0 + (1 - p0)*(1 - a1)`` at the sample mean:
    ``(mean - (1 - a1)) / (a0 + a1 - 1)``.  The raw value can leave [0, 1]
    when the observed mean is not attainable under the stated accuracies;
    it is reported unclamped alongside its clamp and an ``out_of_range``
    flag.
    """
    stats = sample_stats(series)
    return cleam_point_from_mean(stats.mean, acc)


def cleam_interval_from_stats(
    stats: SampleStats, acc: AccuracyProfile, confidence: float = 0.95
) -> IntervalEstimate:
    """Accuracy-corrected confidence interval from precomputed sample statistics."""
    denominator = _correction_denominator(acc)
    miss1 = 1.0 - float(acc.alpha[1])
    offset = z_value(confidence) * stats.std / math.sqrt(stats.s)
    lower = (stats.mean - offset - miss1) / denominator
    upper = (stats.mean + offset - miss1) / denominator
    if lower > upper:
        # A negative denominator (worse-than-chance classifier) flips the bounds.
        lower, upper = upper, lower
    return IntervalEstimate(lower, upper, confidence)


def cleam_interval(series: PhatSeries, acc: AccuracyProfile, confidence: float = 0.95) -> IntervalEstimate:
    """Accuracy-corrected confidence interval for the class-0 prevalence.

    Both bounds of the baseline interval mean -/+ z * std / sqrt(s) are
    pushed through the same correction as :func:`cleam_point`.
    """
    return cleam_interval_from_stats(sample_stats(series), acc, confidence)


@dataclass(frozen=True)
class ChannelSolveResult:
    """Outcome of inverting a classification channel at an observed mean.

    ``raw`` is the unclamped linear-solve solution; ``distribution`` is its
    projection onto the simplex (clamped to [0, 1] and renormalized).
    ``out_of_range`` is set when the raw solution leaves the simplex by more
    than ``SIMPLEX_TOL``.
    """

    distribution: ClassDistribution
    raw: np.ndarray
    out_of_range: bool
    condition_number: float

    def point(self, index: int = 0) -> PointEstimate:
        """Point estimate for one class, keeping the raw unclamped value."""
        return PointEstimate.from_value(float(self.raw[index]))


def _check_invertible(matrix: np.ndarray) -> float:
    condition = float(np.linalg.cond(matrix))
    if not math.isfinite(condition) or condition > MAX_CONDITION_NUMBER:
        raise SingularChannelError(
            f"the classification channel is numerically singular (condition number {condition:.3g})"
        )
    return condition


def _project_solution(raw: np.ndarray, condition: float) -> ChannelSolveResult:
    out_of_range = bool(raw.min() < -SIMPLEX_TOL or raw.max() > 1.0 + SIMPLEX_TOL)
    clipped = np.clip(raw, 0.0, 1.0)
    total = float(clipped.sum())
    if total <= 0.0:
        raise SingularChannelError("the channel solve produced no probability mass to renormalize")
    return ChannelSolveResult(
        distribution=ClassDistribution(clipped / total),
        raw=raw,
        out_of_range=out_of_range,
        condition_number=condition,
    )


def multiclass_estimate(mean_phat: ClassDistribution, cm: ConfusionMatrix) -> ChannelSolveResult:
    """Solve ``A @ p = mean_phat`` for the prevalence vector ``p``.

    Reduces to :func:`cleam_point` when ``A`` is the 2x2 channel built from a
    binary accuracy profile.
    """
    if cm.n_classes != mean_phat.n_classes:
        raise InvalidInputError(
            f"channel has {cm.n_classes} classes but the observed mean has {mean_phat.n_classes}"
        )
    condition = _check_invertible(cm.entries)
    raw = np.linalg.solve(cm.entries, mean_phat.probs)
    return _project_solution(raw, condition)


def bbse_estimate(
    mean_phat: ClassDistribution,
    cm: ConfusionMatrix,
    source_prior: ClassDistribution | None = None,
) -> ChannelSolveResult:
    """Label-shift reweighting of a source prior toward the observed output.

    The joint (predicted, true) confusion under the source prior is
    ``C[i, j] = cm[i, j] * prior[j]``.  Solving ``C @ w = mean_phat`` gives
    the class-weight vector; the target prevalence is ``w * prior``,
    renormalized.  With a channel known exactly this coincides with
    :func:`multiclass_estimate`; the two differ once ``C`` is estimated from
    finite validation data.
    """
    if cm.n_classes != mean_phat.n_classes:
        raise InvalidInputError(
            f"channel has {cm.n_classes} classes but the observed mean has {mean_phat.n_classes}"
        )
    if source_prior is None:
        source_prior = ClassDistribution.uniform(cm.n_classes)
    if source_prior.n_classes != cm.n_classes:
        raise InvalidInputError(
            f"source prior has {source_prior.n_classes} classes but the channel has {cm.n_classes}"
        )
    joint = cm.entries * source_prior.probs
    condition = _check_invertible(joint)
    weights = np.linalg.solve(joint, mean_phat.probs)
    raw = weights * source_prior.probs
    return _project_solution(raw, condition)
