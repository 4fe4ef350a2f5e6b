"""Deterministic pseudo-generator experiments.

Batches of true labels are drawn from a known class distribution and pushed
through a noisy classification channel, producing the same per-batch
proportion series a real classifier would emit.  Every repetition owns an
independent Philox substream keyed by (seed, repetition), so results are
bit-identical for a given seed regardless of execution order or scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import metrics
from .estimators import (
    baseline_estimate,
    bbse_estimate,
    cleam_interval_from_stats,
    cleam_point_from_mean,
    multiclass_estimate,
    sample_stats,
    z_value,
)
from .exceptions import CleamError, InvalidInputError
from .model import event_probabilities
from .types import (
    AccuracyProfile,
    ClassDistribution,
    ConfusionMatrix,
    EstimateReport,
    IntervalEstimate,
    PhatSeries,
    SampleStats,
)

Channel = AccuracyProfile | ConfusionMatrix

ESTIMATOR_NAMES = ("baseline", "cleam", "multiclass", "bbse")

_UINT64_MASK = (1 << 64) - 1


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent random stream for one unit of work.

    Philox is counter based: the (seed, index) key fully determines the
    stream, so repetitions can be generated in any order, or in parallel,
    without changing their draws.
    """
    key = np.array([int(seed) & _UINT64_MASK, int(index) & _UINT64_MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def channel_matrix(channel: Channel) -> np.ndarray:
    """The channel as a column-stochastic matrix."""
    if isinstance(channel, ConfusionMatrix):
        return channel.entries
    return ConfusionMatrix.from_accuracy(channel).entries


def channel_n_classes(channel: Channel) -> int:
    return channel.n_classes


def _binary_accuracy(channel: Channel) -> AccuracyProfile:
    if isinstance(channel, AccuracyProfile):
        channel.require_binary()
        return channel
    if channel.n_classes != 2:
        raise InvalidInputError("the accuracy-corrected binary estimator needs a 2-class channel")
    return AccuracyProfile(np.array([channel.entries[0, 0], channel.entries[1, 1]]))


@dataclass(frozen=True)
class ScenarioConfig:
    """One pseudo-generator scenario: a ground truth, a channel, and sizes."""

    p_star: ClassDistribution
    channel: Channel
    n: int = 400
    s: int = 30
    repetitions: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if int(self.n) < 1:
            raise InvalidInputError(f"batch size n must be >= 1, got {self.n}")
        if int(self.s) < 2:
            raise InvalidInputError(f"batches per series s must be >= 2, got {self.s}")
        if int(self.repetitions) < 1:
            raise InvalidInputError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.p_star.n_classes != channel_n_classes(self.channel):
            raise InvalidInputError(
                f"p_star has {self.p_star.n_classes} classes but the channel has "
                f"{channel_n_classes(self.channel)}"
            )
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "s", int(self.s))
        object.__setattr__(self, "repetitions", int(self.repetitions))
        object.__setattr__(self, "seed", int(self.seed) & _UINT64_MASK)


#: Scenario used when nothing else is configured: a strongly biased binary
#: generator observed through a highly accurate classifier at the standard
#: batch sizes (n=400 samples per batch, s=30 batches).
DEFAULT_SCENARIO = ScenarioConfig(
    p_star=ClassDistribution.binary(0.9),
    channel=AccuracyProfile(np.array([0.976, 0.979])),
)


@dataclass(frozen=True)
class BatchObservation:
    """Predicted-class counts for one simulated batch."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size < 2 or counts.min() < 0:
            raise InvalidInputError(f"counts must be a non-negative vector per class, got {counts!r}")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def phat(self) -> np.ndarray:
        """Per-class proportions, each the exact ratio count / n."""
        return self.counts / float(self.n)


def simulate_event_counts(
    p_star: ClassDistribution, acc: AccuracyProfile, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Counts of the four (true, predicted) outcomes for one batch of n draws."""
    return rng.multinomial(int(n), event_probabilities(p_star, acc).p)


def simulate_batch(
    p_star: ClassDistribution, channel: Channel, n: int, rng: np.random.Generator
) -> BatchObservation:
    """Predicted-class counts of one batch: true class from p_star, label from the channel."""
    n = int(n)
    if n < 1:
        raise InvalidInputError(f"batch size n must be >= 1, got {n}")
    if isinstance(channel, AccuracyProfile):
        events = simulate_event_counts(p_star, channel, n, rng)
        return BatchObservation(np.array([events[0] + events[3], events[1] + events[2]]))
    matrix = channel_matrix(channel)
    true_counts = rng.multinomial(n, p_star.probs)
    predicted = np.zeros(channel.n_classes, dtype=np.int64)
    for j in range(channel.n_classes):
        predicted += rng.multinomial(int(true_counts[j]), matrix[:, j])
    return BatchObservation(predicted)


def simulate_proportion_matrix(
    p_star: ClassDistribution, channel: Channel, n: int, batches: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-class predicted proportions for many batches, shape (batches, K).

    Vectorized equivalent of repeated :func:`simulate_batch` calls; used for
    the large Monte Carlo runs.
    """
    n = int(n)
    batches = int(batches)
    if n < 1 or batches < 1:
        raise InvalidInputError("n and batches must both be >= 1")
    if isinstance(channel, AccuracyProfile):
        events = rng.multinomial(n, event_probabilities(p_star, channel).p, size=batches)
        class0 = events[:, 0] + events[:, 3]
        return np.column_stack([class0, n - class0]) / float(n)
    matrix = channel_matrix(channel)
    true_counts = rng.multinomial(n, p_star.probs, size=batches)
    predicted = np.zeros((batches, channel.n_classes), dtype=np.int64)
    for j in range(channel.n_classes):
        predicted += rng.multinomial(true_counts[:, j], matrix[:, j])
    return predicted / float(n)


def simulate_phat_series(
    p_star: ClassDistribution, channel: Channel, n: int, s: int, rng: np.random.Generator
) -> PhatSeries:
    """A series of s class-0 batch proportions from a binary channel."""
    if channel_n_classes(channel) != 2:
        raise InvalidInputError("a class-0 proportion series requires a binary channel")
    proportions = simulate_proportion_matrix(p_star, channel, n, s, rng)
    return PhatSeries(proportions[:, 0], n=int(n))


def _solved_interval(
    stats: SampleStats,
    confidence: float,
    solve_component0: Callable[[float], float],
) -> IntervalEstimate:
    offset = z_value(confidence) * stats.std / math.sqrt(stats.s)
    lower = solve_component0(stats.mean - offset)
    upper = solve_component0(stats.mean + offset)
    if lower > upper:
        lower, upper = upper, lower
    return IntervalEstimate(lower, upper, confidence)


def evaluate_estimator(
    name: str, series: PhatSeries, channel: Channel, confidence: float = 0.95
) -> EstimateReport:
    """Run one named estimator on a binary proportion series.

    Known names: ``baseline`` (uncorrected mean), ``cleam`` (binary accuracy
    correction), ``multiclass`` (confusion-matrix solve), ``bbse``
    (label-shift reweighting with a uniform source prior).
    """
    if name not in ESTIMATOR_NAMES:
        raise InvalidInputError(f"unknown estimator {name!r}; expected one of {ESTIMATOR_NAMES}")
    stats = sample_stats(series)
    if name == "baseline":
        point, interval = baseline_estimate(series, confidence)
        return EstimateReport(
            estimator=name,
            point=point,
            interval=interval,
            distribution=(point.clamped_value, 1.0 - point.clamped_value),
        )
    if name == "cleam":
        acc = _binary_accuracy(channel)
        point = cleam_point_from_mean(stats.mean, acc)
        interval = cleam_interval_from_stats(stats, acc, confidence)
        return EstimateReport(
            estimator=name,
            point=point,
            interval=interval,
            distribution=(point.clamped_value, 1.0 - point.clamped_value),
        )

    cm = channel if isinstance(channel, ConfusionMatrix) else ConfusionMatrix.from_accuracy(channel)
    if cm.n_classes != 2:
        raise InvalidInputError("evaluate_estimator works on binary series; use the estimator functions for K > 2")
    mean_dist = ClassDistribution.binary(stats.mean)
    if name == "multiclass":
        solved = multiclass_estimate(mean_dist, cm)
        inverse = np.linalg.inv(cm.entries)

        def solve0(x: float) -> float:
            return float(inverse[0, 0] * x + inverse[0, 1] * (1.0 - x))

    else:  # bbse
        prior = ClassDistribution.uniform(2)
        solved = bbse_estimate(mean_dist, cm, prior)
        inverse = np.linalg.inv(cm.entries * prior.probs)

        def solve0(x: float) -> float:
            weights0 = inverse[0, 0] * x + inverse[0, 1] * (1.0 - x)
            return float(weights0 * prior.probs[0])

    interval = _solved_interval(stats, confidence, solve0)
    return EstimateReport(
        estimator=name,
        point=solved.point(0),
        interval=interval,
        distribution=tuple(float(v) for v in solved.distribution.probs),
        details={"condition_number": solved.condition_number, "out_of_range": solved.out_of_range},
    )


def _scored(report: EstimateReport, p_star_0: float) -> EstimateReport:
    return replace(
        report,
        point_error=metrics.point_error(p_star_0, report.point.value),
        interval_error=(
            metrics.interval_error(p_star_0, report.interval) if report.interval is not None else None
        ),
    )


@dataclass(frozen=True)
class RepetitionResult:
    """Estimator reports for one simulated series."""

    index: int
    reports: dict[str, EstimateReport]
    failures: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ScenarioResult:
    """All repetitions of one scenario plus per-estimator mean errors."""

    config: ScenarioConfig
    estimators: tuple[str, ...]
    repetitions: tuple[RepetitionResult, ...]
    mean_point_error: dict[str, float]
    mean_interval_error: dict[str, float]


def run_scenario(
    cfg: ScenarioConfig,
    estimators: Sequence[str] = ("baseline", "cleam"),
    confidence: float = 0.95,
) -> ScenarioResult:
    """Simulate every repetition of a scenario and score each estimator.

    An estimator failure (for example a degenerate accuracy profile) is
    recorded per repetition rather than aborting the run.  Aggregation order
    is fixed by repetition index, so results are independent of scheduling.
    """
    estimators = tuple(estimators)
    for name in estimators:
        if name not in ESTIMATOR_NAMES:
            raise InvalidInputError(f"unknown estimator {name!r}; expected one of {ESTIMATOR_NAMES}")
    p_star_0 = float(cfg.p_star.probs[0])
    reps: list[RepetitionResult] = []
    for index in range(cfg.repetitions):
        rng = substream(cfg.seed, index)
        series = simulate_phat_series(cfg.p_star, cfg.channel, cfg.n, cfg.s, rng)
        reports: dict[str, EstimateReport] = {}
        failures: dict[str, str] = {}
        for name in estimators:
            try:
                reports[name] = _scored(evaluate_estimator(name, series, cfg.channel, confidence), p_star_0)
            except CleamError as exc:
                failures[name] = str(exc)
        reps.append(RepetitionResult(index=index, reports=reports, failures=failures))

    mean_pe: dict[str, float] = {}
    mean_ie: dict[str, float] = {}
    for name in estimators:
        point_errors = [r.reports[name].point_error for r in reps if name in r.reports]
        interval_errors = [
            r.reports[name].interval_error
            for r in reps
            if name in r.reports and r.reports[name].interval_error is not None
        ]
        if point_errors:
            mean_pe[name] = float(np.mean(point_errors))
        if interval_errors:
            mean_ie[name] = float(np.mean(interval_errors))
    return ScenarioResult(
        config=cfg,
        estimators=estimators,
        repetitions=tuple(reps),
        mean_point_error=mean_pe,
        mean_interval_error=mean_ie,
    )


@dataclass(frozen=True)
class GridResult:
    """Scenario results over a grid of ground-truth values (and batch sizes)."""

    results: tuple[ScenarioResult, ...]
    average_point_error: dict[str, float]
    average_interval_error: dict[str, float]


def run_grid(
    channel: Channel,
    p_star_values: Iterable[float],
    n: int = 400,
    s: int = 30,
    repetitions: int = 5,
    seed: int = 0,
    estimators: Sequence[str] = ("baseline", "cleam"),
    confidence: float = 0.95,
) -> GridResult:
    """Run one scenario per ground-truth value and average the errors.

    Each grid cell gets its own seed (base seed + cell index) so cells draw
    from independent substream families.
    """
    results: list[ScenarioResult] = []
    for cell, p0 in enumerate(p_star_values):
        cfg = ScenarioConfig(
            p_star=ClassDistribution.binary(float(p0)),
            channel=channel,
            n=n,
            s=s,
            repetitions=repetitions,
            seed=int(seed) + cell,
        )
        results.append(run_scenario(cfg, estimators=estimators, confidence=confidence))
    if not results:
        raise InvalidInputError("the grid needs at least one ground-truth value")

    average_pe: dict[str, float] = {}
    average_ie: dict[str, float] = {}
    for name in results[0].estimators:
        pe = [r.mean_point_error[name] for r in results if name in r.mean_point_error]
        ie = [r.mean_interval_error[name] for r in results if name in r.mean_interval_error]
        if pe:
            average_pe[name] = float(np.mean(pe))
        if ie:
            average_ie[name] = float(np.mean(ie))
    return GridResult(results=tuple(results), average_point_error=average_pe, average_interval_error=average_ie)


def coverage_experiment(
    cfg: ScenarioConfig, confidence: float = 0.95, estimator: str = "cleam"
) -> float:
    """Fraction of repetitions whose interval estimate contains the true p0.

    Requires at least 200 repetitions for the coverage fraction to be
    meaningful.  Repetitions where the estimator fails count as non-covering.
    """
    if cfg.repetitions < 200:
        raise InvalidInputError(f"coverage experiments need >= 200 repetitions, got {cfg.repetitions}")
    result = run_scenario(cfg, estimators=(estimator,), confidence=confidence)
    p_star_0 = float(cfg.p_star.probs[0])
    hits = 0
    for rep in result.repetitions:
        report = rep.reports.get(estimator)
        if report is not None and report.interval is not None and report.interval.contains(p_star_0):
            hits += 1
    return hits / cfg.repetitions
