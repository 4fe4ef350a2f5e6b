"""Scikit-learn style estimators wrapping the functional core.

Every estimator follows the usual contract: hyperparameters are stored
verbatim in ``__init__``, ``fit`` validates them and sets fitted attributes
(with trailing underscores), and ``predict`` maps a matrix of observed batch
proportions to the estimated class-prevalence vector.  ``get_params`` /
``set_params`` and :func:`sklearn.base.clone` work as usual.

Input convention
----------------
``X`` holds per-batch proportions: either shape ``(s,)`` with the class-0
proportion of each batch (binary attributes), or shape ``(s, n_classes)``
with the full per-class proportions, one row per batch.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .estimators import (
    bbse_estimate,
    cleam_interval_from_stats,
    cleam_point_from_mean,
    multiclass_estimate,
    z_value,
)
from .exceptions import InvalidInputError
from .types import (
    AccuracyProfile,
    ClassDistribution,
    ConfusionMatrix,
    IntervalEstimate,
    SampleStats,
)


def check_proportions(X, n_classes: int | None = None) -> np.ndarray:
    """Validate batch proportions and return them with shape (s, n_classes).

    A 1-D input is read as class-0 proportions and completed to two columns.
    Rows of a 2-D input must each sum to 1 (within normalization tolerance).
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = np.column_stack([arr, 1.0 - arr])
    if arr.ndim != 2:
        raise InvalidInputError(f"expected proportions of shape (s,) or (s, n_classes), got {arr.shape}")
    if arr.shape[0] < 2:
        raise InvalidInputError(f"at least 2 batches are required, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("proportions contain non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise InvalidInputError("proportions must lie in [0, 1]")
    row_sums = arr.sum(axis=1)
    if np.any(np.abs(row_sums - 1.0) > 1e-6):
        raise InvalidInputError("each row of proportions must sum to 1")
    if n_classes is not None and arr.shape[1] != n_classes:
        raise InvalidInputError(f"expected {n_classes} classes per row, got {arr.shape[1]}")
    return arr


def _mean_distribution(arr: np.ndarray) -> ClassDistribution:
    # Row sums are validated to 1e-6 above, looser than the distribution
    # type's tolerance, so renormalize the mean explicitly.
    mean = arr.mean(axis=0)
    return ClassDistribution(mean / mean.sum())


class _PrevalenceEstimator(BaseEstimator):
    """Shared fitted-state plumbing for the prevalence estimators."""

    def _check_is_fitted(self) -> None:
        if not hasattr(self, "n_classes_"):
            raise NotFittedError(f"this {type(self).__name__} instance is not fitted yet; call fit() first")

    def fit(self, X=None, y=None):
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        raise NotImplementedError


class BaselineEstimator(_PrevalenceEstimator):
    """Mean observed batch proportion, with no accuracy correction.

    Parameters
    ----------
    confidence : float, default=0.95
        Level of the normal confidence interval returned by
        :meth:`predict_interval`.
    """

    def __init__(self, confidence: float = 0.95):
        self.confidence = confidence

    def fit(self, X=None, y=None):
        z_value(self.confidence)
        self.n_classes_ = None  # fixed at first predict
        return self

    def predict(self, X) -> np.ndarray:
        self._check_is_fitted()
        arr = check_proportions(X, self.n_classes_)
        return arr.mean(axis=0)

    def predict_interval(self, X) -> IntervalEstimate:
        """Confidence interval for the class-0 prevalence (binary input)."""
        self._check_is_fitted()
        arr = check_proportions(X, 2)
        values = arr[:, 0]
        offset = z_value(self.confidence) * float(values.std(ddof=1)) / np.sqrt(values.size)
        mean = float(values.mean())
        return IntervalEstimate(mean - offset, mean + offset, self.confidence)


class CleamEstimator(_PrevalenceEstimator):
    """Accuracy-corrected prevalence estimator for a binary attribute.

    Parameters
    ----------
    alpha : array-like of shape (2,)
        Per-class accuracies of the attribute classifier.
    confidence : float, default=0.95
        Level of the corrected confidence interval.
    """

    def __init__(self, alpha=None, confidence: float = 0.95):
        self.alpha = alpha
        self.confidence = confidence

    def fit(self, X=None, y=None):
        if self.alpha is None:
            raise InvalidInputError("alpha must be provided before fitting")
        z_value(self.confidence)
        accuracy = AccuracyProfile(np.asarray(self.alpha, dtype=float))
        accuracy.require_binary()
        self.accuracy_ = accuracy
        self.n_classes_ = 2
        return self

    def predict(self, X) -> np.ndarray:
        self._check_is_fitted()
        arr = check_proportions(X, 2)
        point = cleam_point_from_mean(float(arr[:, 0].mean()), self.accuracy_)
        return np.array([point.clamped_value, 1.0 - point.clamped_value])

    def predict_interval(self, X) -> IntervalEstimate:
        """Corrected confidence interval for the class-0 prevalence."""
        self._check_is_fitted()
        arr = check_proportions(X, 2)
        values = arr[:, 0]
        stats = SampleStats(mean=float(values.mean()), std=float(values.std(ddof=1)), s=int(values.size))
        return cleam_interval_from_stats(stats, self.accuracy_, self.confidence)


class MulticlassCleamEstimator(_PrevalenceEstimator):
    """Prevalence estimator that inverts a full confusion matrix.

    Parameters
    ----------
    confusion : array-like of shape (n_classes, n_classes)
        Column-stochastic channel; entry (i, j) is the probability of
        predicting class i for a sample of true class j.
    """

    def __init__(self, confusion=None):
        self.confusion = confusion

    def fit(self, X=None, y=None):
        if self.confusion is None:
            raise InvalidInputError("confusion must be provided before fitting")
        self.confusion_ = ConfusionMatrix(np.asarray(self.confusion, dtype=float))
        self.condition_number_ = self.confusion_.condition_number()
        self.n_classes_ = self.confusion_.n_classes
        return self

    def predict(self, X) -> np.ndarray:
        self._check_is_fitted()
        mean_dist = _mean_distribution(check_proportions(X, self.n_classes_))
        return multiclass_estimate(mean_dist, self.confusion_).distribution.probs.copy()


class BbseEstimator(_PrevalenceEstimator):
    """Label-shift reweighting of a source prior toward the observed output.

    Parameters
    ----------
    confusion : array-like of shape (n_classes, n_classes)
        Column-stochastic channel measured on the source (validation) data.
    source_prior : array-like of shape (n_classes,), optional
        Class prior of the source data; uniform when omitted.
    """

    def __init__(self, confusion=None, source_prior=None):
        self.confusion = confusion
        self.source_prior = source_prior

    def fit(self, X=None, y=None):
        if self.confusion is None:
            raise InvalidInputError("confusion must be provided before fitting")
        self.confusion_ = ConfusionMatrix(np.asarray(self.confusion, dtype=float))
        self.n_classes_ = self.confusion_.n_classes
        if self.source_prior is None:
            self.source_prior_ = ClassDistribution.uniform(self.n_classes_)
        else:
            self.source_prior_ = ClassDistribution(np.asarray(self.source_prior, dtype=float))
        return self

    def predict(self, X) -> np.ndarray:
        self._check_is_fitted()
        mean_dist = _mean_distribution(check_proportions(X, self.n_classes_))
        return bbse_estimate(mean_dist, self.confusion_, self.source_prior_).distribution.probs.copy()
