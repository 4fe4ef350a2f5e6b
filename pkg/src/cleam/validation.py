"""Goodness-of-fit checks between observed batch proportions and the model.

The Kolmogorov-Smirnov test and quantile-quantile export judge whether a
proportion series is consistent with the Gaussian predicted by the model;
the variance oracle pits the two closed-form variance candidates against a
large Monte Carlo run to confirm which one is correct.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .estimators import sample_stats
from .exceptions import DegenerateModelError, InsufficientSamplesError, InvalidInputError
from .model import phat_distribution, phat_variance_candidates
from .simulator import simulate_proportion_matrix, substream
from .types import AccuracyProfile, ClassDistribution, GaussianSpec, PhatSeries


def ks_critical_value(s: int, significance: float = 0.05) -> float:
    """Asymptotic KS critical value c(delta) / sqrt(s).

    Uses c(delta) = sqrt(-ln(delta / 2) / 2), which is 1.358 at the usual
    delta = 0.05 and gives 0.248 for s = 30 batches.
    """
    s = int(s)
    if s < 1:
        raise InvalidInputError(f"s must be >= 1, got {s}")
    significance = float(significance)
    if not 0.0 < significance < 1.0:
        raise InvalidInputError(f"significance must lie in (0, 1), got {significance!r}")
    return math.sqrt(-math.log(significance / 2.0) / 2.0) / math.sqrt(s)


@dataclass(frozen=True)
class KsResult:
    """Kolmogorov-Smirnov test outcome."""

    d_statistic: float
    d_critical: float
    reject: bool
    significance: float


def ks_test(series: PhatSeries, spec: GaussianSpec, significance: float = 0.05) -> KsResult:
    """One-sample KS test of the series against the model Gaussian.

    The statistic is the sup distance between the right-continuous empirical
    CDF and the Gaussian CDF.  With the sample sorted it equals
    ``max_i max(F(x_i) - (i - 1)/s, i/s - F(x_i))``, the two one-sided
    deviations at the jump points.
    """
    if series.s < 5:
        raise InsufficientSamplesError(f"the KS test needs at least 5 batches, got {series.s}")
    x = np.sort(series.values)
    s = series.s
    if spec.std == 0.0:
        if float(np.ptp(x)) != 0.0:
            raise DegenerateModelError(
                "the model has zero variance but the series is not constant; the KS statistic is not informative"
            )
        d = 0.0 if float(x[0]) == spec.mean else 1.0
    else:
        dist = NormalDist(mu=spec.mean, sigma=spec.std)
        cdf = np.array([dist.cdf(float(v)) for v in x])
        positions = np.arange(1, s + 1, dtype=float)
        d = float(max((cdf - (positions - 1.0) / s).max(), (positions / s - cdf).max()))
    d_critical = ks_critical_value(s, significance)
    return KsResult(d_statistic=d, d_critical=d_critical, reject=d > d_critical, significance=significance)


def qq_points(series: PhatSeries, spec: GaussianSpec) -> np.ndarray:
    """(model quantile, sample quantile) pairs for a QQ plot, shape (s, 2).

    Sample quantiles are the sorted values; model quantiles are evaluated at
    the plotting positions (i - 0.5) / s.  A series that exactly matches the
    model lies on the line y = x.
    """
    x = np.sort(series.values)
    s = series.s
    if spec.std == 0.0:
        theoretical = np.full(s, spec.mean)
    else:
        dist = NormalDist(mu=spec.mean, sigma=spec.std)
        theoretical = np.array([dist.inv_cdf((i - 0.5) / s) for i in range(1, s + 1)])
    return np.column_stack([theoretical, x])


@dataclass(frozen=True)
class StatComparison:
    """Sample statistics of a series next to the model-implied ones."""

    sample_mean: float
    sample_std: float
    model_mean: float
    model_std: float

    def to_dict(self) -> dict[str, float]:
        return {
            "sample_mean": self.sample_mean,
            "sample_std": self.sample_std,
            "model_mean": self.model_mean,
            "model_std": self.model_std,
        }


def compare_sample_vs_model(
    series: PhatSeries, p_star: ClassDistribution, acc: AccuracyProfile
) -> StatComparison:
    """Sample mean/std of an observed series against the model's mean/std."""
    stats = sample_stats(series)
    spec = phat_distribution(p_star, acc, series.n)
    return StatComparison(
        sample_mean=stats.mean,
        sample_std=stats.std,
        model_mean=spec.mean,
        model_std=spec.std,
    )


@dataclass(frozen=True)
class VarianceOracleResult:
    """Monte Carlo variance of the class-0 proportion next to both closed forms."""

    empirical_var: float
    binomial_var: float
    positive_cross_var: float
    batches: int
    n: int

    @property
    def closer_candidate(self) -> str:
        """Which closed form the Monte Carlo variance is closer to."""
        if abs(self.empirical_var - self.binomial_var) <= abs(self.empirical_var - self.positive_cross_var):
            return "binomial"
        return "positive_cross"

    def to_dict(self) -> dict[str, float | int | str]:
        return {
            "empirical_var": self.empirical_var,
            "binomial_var": self.binomial_var,
            "positive_cross_var": self.positive_cross_var,
            "batches": self.batches,
            "n": self.n,
            "closer_candidate": self.closer_candidate,
        }


def variance_oracle(
    p_star: ClassDistribution,
    acc: AccuracyProfile,
    n: int,
    batches: int = 100_000,
    seed: int = 0,
) -> VarianceOracleResult:
    """Settle the variance form by simulation.

    Simulates ``batches`` independent batches of size ``n`` and reports the
    empirical variance of the class-0 proportion alongside the two analytic
    candidates from :func:`cleam.model.phat_variance_candidates`.
    """
    batches = int(batches)
    if batches < 10_000:
        raise InvalidInputError(f"the variance oracle needs >= 10000 batches, got {batches}")
    proportions = simulate_proportion_matrix(p_star, acc, n, batches, substream(seed, 0))
    empirical = float(proportions[:, 0].var(ddof=1))
    binomial, positive_cross = phat_variance_candidates(p_star, acc, n)
    return VarianceOracleResult(
        empirical_var=empirical,
        binomial_var=binomial,
        positive_cross_var=positive_cross,
        batches=batches,
        n=int(n),
    )
