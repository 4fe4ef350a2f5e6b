"""Domain types: accuracy profiles, class distributions, observed batch series.

All values are immutable after construction.  Construction validates the
invariants and raises :class:`~cleam.exceptions.InvalidInputError` (or a
subclass) on violation, so any instance that exists is safe to share between
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .exceptions import InsufficientSamplesError, InvalidInputError

#: Tolerated normalization drift for probability vectors.  Inputs within this
#: drift are renormalized; anything further off is rejected.
PROB_TOL = 1e-9

#: Threshold below which a binary accuracy profile is flagged as chance level.
DEGENERATE_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def as_probability_vector(values: Any, *, name: str = "probs", min_length: int = 2) -> np.ndarray:
    """Validate and renormalize a probability vector.

    Entries must lie in [0, 1] and sum to 1 within ``PROB_TOL``; the returned
    array is renormalized exactly and marked read-only.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if arr.size < min_length:
        raise InvalidInputError(f"{name} needs at least {min_length} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    if arr.min() < -PROB_TOL or arr.max() > 1.0 + PROB_TOL:
        raise InvalidInputError(f"{name} entries must lie in [0, 1], got {arr.tolist()}")
    total = float(arr.sum())
    if abs(total - 1.0) > PROB_TOL:
        raise InvalidInputError(f"{name} must sum to 1 within {PROB_TOL}, got {total!r}")
    return _frozen(np.clip(arr / total, 0.0, 1.0))


def check_unit_interval(value: float, *, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0.0 or value > 1.0:
        raise InvalidInputError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class AccuracyProfile:
    """Per-class accuracies of a sensitive-attribute classifier.

    ``alpha[i]`` is the probability that a sample whose true class is ``i``
    gets labeled ``i``; the complement ``1 - alpha[i]`` is the per-class
    error rate.  Entries must be strictly positive (a class the classifier
    never recognizes carries no signal) and at most 1.
    """

    alpha: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.alpha, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise InvalidInputError(f"alpha must be a vector with one entry per class, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("alpha contains non-finite entries")
        if arr.min() <= 0.0 or arr.max() > 1.0:
            raise InvalidInputError(f"alpha entries must lie in (0, 1], got {arr.tolist()}")
        object.__setattr__(self, "alpha", _frozen(arr))

    @property
    def n_classes(self) -> int:
        return int(self.alpha.size)

    @property
    def error_rates(self) -> np.ndarray:
        """Per-class error rates, 1 - alpha."""
        return _frozen(1.0 - self.alpha)

    def require_binary(self) -> None:
        if self.n_classes != 2:
            raise InvalidInputError(f"a binary accuracy profile is required, got {self.n_classes} classes")

    def is_degenerate(self, tol: float = DEGENERATE_TOL) -> bool:
        """True when the binary profile is at chance level (alpha0 + alpha1 == 1).

        At chance level the mean classifier output no longer depends on the
        true prevalence, so the accuracy correction is undefined.
        """
        self.require_binary()
        return abs(float(self.alpha[0] + self.alpha[1]) - 1.0) < tol

    def correction_denominator(self) -> float:
        """alpha0 - (1 - alpha1), the slope of mean output in the true prevalence."""
        self.require_binary()
        return float(self.alpha[0] + self.alpha[1] - 1.0)

    @property
    def skew(self) -> float:
        """|alpha0 - alpha1|, the accuracy asymmetry.

        An asymmetric profile biases the uncorrected mean even for a
        perfectly balanced generator, which is what the corrected estimator
        removes.
        """
        self.require_binary()
        return abs(float(self.alpha[0] - self.alpha[1]))


@dataclass(frozen=True)
class ClassDistribution:
    """A probability vector over sensitive-attribute classes."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", as_probability_vector(self.probs, name="probs"))

    @property
    def n_classes(self) -> int:
        return int(self.probs.size)

    def require_binary(self) -> None:
        if self.n_classes != 2:
            raise InvalidInputError(f"a binary class distribution is required, got {self.n_classes} classes")

    @classmethod
    def uniform(cls, n_classes: int) -> "ClassDistribution":
        if n_classes < 2:
            raise InvalidInputError("a class distribution needs at least 2 classes")
        return cls(np.full(n_classes, 1.0 / n_classes))

    @classmethod
    def binary(cls, p0: float) -> "ClassDistribution":
        p0 = check_unit_interval(p0, name="p0")
        return cls(np.array([p0, 1.0 - p0]))


@dataclass(frozen=True)
class EventProbabilities:
    """Joint probabilities of the four (true, predicted) outcomes of one draw.

    Order: [class 0 labeled 0, class 0 labeled 1, class 1 labeled 1,
    class 1 labeled 0].  Entries 0 and 3 are the two ways a draw ends up
    predicted as class 0.
    """

    p: np.ndarray

    def __post_init__(self) -> None:
        arr = as_probability_vector(self.p, name="event probabilities", min_length=4)
        if arr.size != 4:
            raise InvalidInputError(f"expected 4 event probabilities, got {arr.size}")
        object.__setattr__(self, "p", arr)


@dataclass(frozen=True)
class GaussianSpec:
    """Normal approximation of the class-0 batch proportion at batch size ``n``."""

    mean: float
    std: float
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean", check_unit_interval(self.mean, name="mean"))
        std = float(self.std)
        n = int(self.n)
        if n < 1:
            raise InvalidInputError(f"n must be >= 1, got {n}")
        if not np.isfinite(std) or std < 0.0:
            raise InvalidInputError(f"std must be non-negative, got {std!r}")
        # A proportion of n draws can never exceed the binomial variance bound.
        if std * std > 0.25 / n + 1e-12:
            raise InvalidInputError(f"std^2 = {std * std!r} exceeds the binomial bound 0.25/n for n={n}")
        object.__setattr__(self, "std", std)
        object.__setattr__(self, "n", n)

    @property
    def variance(self) -> float:
        return self.std * self.std


@dataclass(frozen=True)
class ConfusionMatrix:
    """Column-stochastic classification channel.

    ``entries[i, j]`` is the probability that a sample whose true class is
    ``j`` is predicted as class ``i``, so every column sums to 1.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidInputError(f"confusion matrix must be square, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise InvalidInputError("confusion matrix needs at least 2 classes")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("confusion matrix contains non-finite entries")
        if arr.min() < -PROB_TOL or arr.max() > 1.0 + PROB_TOL:
            raise InvalidInputError("confusion matrix entries must lie in [0, 1]")
        sums = arr.sum(axis=0)
        if np.any(np.abs(sums - 1.0) > PROB_TOL):
            raise InvalidInputError(f"confusion matrix columns must sum to 1 within {PROB_TOL}, got {sums.tolist()}")
        object.__setattr__(self, "entries", _frozen(np.clip(arr, 0.0, 1.0) / sums))

    @property
    def n_classes(self) -> int:
        return int(self.entries.shape[0])

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.entries))

    @classmethod
    def from_accuracy(cls, acc: AccuracyProfile) -> "ConfusionMatrix":
        """Binary channel [[a0, 1-a1], [1-a0, a1]] for an accuracy profile."""
        acc.require_binary()
        a0, a1 = (float(v) for v in acc.alpha)
        return cls(np.array([[a0, 1.0 - a1], [1.0 - a0, a1]]))


@dataclass(frozen=True)
class PhatSeries:
    """Class-0 batch proportions observed over ``s`` batches of ``n`` samples each."""

    values: np.ndarray
    n: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            raise InvalidInputError(f"series values must be 1-D, got shape {arr.shape}")
        if arr.size < 2:
            raise InsufficientSamplesError(f"a series needs at least 2 batches, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("series contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise InvalidInputError("series values must lie in [0, 1]")
        n = int(self.n)
        if n < 1:
            raise InvalidInputError(f"batch size n must be >= 1, got {n}")
        object.__setattr__(self, "values", _frozen(arr))
        object.__setattr__(self, "n", n)

    @property
    def s(self) -> int:
        """Number of batches in the series."""
        return int(self.values.size)

    @classmethod
    def from_counts(cls, class0_counts: Any, n: int) -> "PhatSeries":
        """Build a series from integer per-batch counts of class-0 predictions.

        Each proportion is the exact ratio count/n, so multiplying a value
        back by n recovers the integer count.
        """
        counts = np.asarray(class0_counts, dtype=float)
        if np.any(np.abs(counts - np.round(counts)) > PROB_TOL):
            raise InvalidInputError("class-0 counts must be integers")
        counts = np.round(counts)
        if counts.min() < 0 or counts.max() > n:
            raise InvalidInputError(f"class-0 counts must lie in [0, {n}]")
        return cls(counts / float(n), n)


@dataclass(frozen=True)
class SampleStats:
    """Sample mean and standard deviation of a batch-proportion series."""

    mean: float
    std: float
    s: int

    def __post_init__(self) -> None:
        if float(self.std) < 0.0:
            raise InvalidInputError(f"std must be non-negative, got {self.std!r}")


@dataclass(frozen=True)
class PointEstimate:
    """A point estimate together with its clamp onto [0, 1].

    The raw ``value`` is kept because downstream error metrics are computed
    on it; ``clamped_value`` is what a caller should report as a probability.
    """

    value: float
    clamped_value: float
    out_of_range: bool

    def __post_init__(self) -> None:
        expected = min(1.0, max(0.0, float(self.value)))
        if abs(float(self.clamped_value) - expected) > 1e-12:
            raise InvalidInputError("clamped_value must equal value clamped onto [0, 1]")

    @classmethod
    def from_value(cls, value: float) -> "PointEstimate":
        value = float(value)
        clamped = min(1.0, max(0.0, value))
        return cls(value=value, clamped_value=clamped, out_of_range=clamped != value)


@dataclass(frozen=True)
class IntervalEstimate:
    """A two-sided interval estimate at the given confidence level."""

    lower: float
    upper: float
    confidence: float = 0.95

    def __post_init__(self) -> None:
        if not 0.0 < float(self.confidence) < 1.0:
            raise InvalidInputError(f"confidence must lie in (0, 1), got {self.confidence!r}")
        if float(self.lower) > float(self.upper):
            raise InvalidInputError(f"interval bounds out of order: [{self.lower!r}, {self.upper!r}]")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    @property
    def width(self) -> float:
        return float(self.upper - self.lower)


@dataclass(frozen=True)
class EstimateReport:
    """One estimator's output, optionally scored against a known ground truth."""

    estimator: str
    point: PointEstimate
    interval: IntervalEstimate | None = None
    distribution: tuple[float, ...] | None = None
    point_error: float | None = None
    interval_error: float | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "estimator": self.estimator,
            "point": {
                "value": self.point.value,
                "clamped_value": self.point.clamped_value,
                "out_of_range": self.point.out_of_range,
            },
        }
        if self.interval is not None:
            payload["interval"] = {
                "lower": self.interval.lower,
                "upper": self.interval.upper,
                "confidence": self.interval.confidence,
            }
        if self.distribution is not None:
            payload["distribution"] = list(self.distribution)
        if self.point_error is not None:
            payload["point_error"] = self.point_error
        if self.interval_error is not None:
            payload["interval_error"] = self.interval_error
        if self.details:
            payload["details"] = dict(self.details)
        return payload
