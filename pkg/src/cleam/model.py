"""Statistical model of a noisy classifier's output over a batch.

A generated sample is from class 0 with probability ``p0`` and class 1 with
``p1 = 1 - p0``; a class-``i`` sample is labeled correctly with probability
``alpha[i]``.  The per-batch counts of the four (true, predicted) outcomes
are multinomial, and for large batches the class-0 prediction proportion is
well approximated by a Gaussian whose moments this module computes.
"""

from __future__ import annotations

import warnings

import numpy as np

from .exceptions import InvalidInputError
from .types import (
    AccuracyProfile,
    ClassDistribution,
    ConfusionMatrix,
    EventProbabilities,
    GaussianSpec,
)

#: Minimum expected count of the rarer class per batch before the Gaussian
#: approximation is considered trustworthy.
BOUNDARY_MIN_EXPECTED = 5.0


class BoundaryBiasWarning(UserWarning):
    """The Gaussian approximation degrades when one class is nearly absent."""


def _require_binary(p_star: ClassDistribution, acc: AccuracyProfile) -> None:
    p_star.require_binary()
    acc.require_binary()


def event_probabilities(p_star: ClassDistribution, acc: AccuracyProfile) -> EventProbabilities:
    """Probabilities of the four mutually exclusive outcomes of one draw.

    Order: [p0*a0, p0*(1-a0), p1*a1, p1*(1-a1)], i.e. class 0 labeled 0,
    class 0 labeled 1, class 1 labeled 1, class 1 labeled 0.
    """
    _require_binary(p_star, acc)
    p0, p1 = (float(v) for v in p_star.probs)
    a0, a1 = (float(v) for v in acc.alpha)
    return EventProbabilities(np.array([p0 * a0, p0 * (1.0 - a0), p1 * a1, p1 * (1.0 - a1)]))


def covariance_matrix(p_star: ClassDistribution, acc: AccuracyProfile) -> np.ndarray:
    """Per-draw covariance of the event counts: diag(p) - p p^T.

    The covariance of the counts over a batch of n draws is n times this
    matrix.  Rows sum to zero because the four counts always sum to n.
    """
    p = event_probabilities(p_star, acc).p
    return np.diag(p) - np.outer(p, p)


def phat_distribution(p_star: ClassDistribution, acc: AccuracyProfile, n: int) -> GaussianSpec:
    """Gaussian approximation of the class-0 batch proportion.

    Each draw is predicted as class 0 with probability
    ``q = p0*a0 + p1*(1 - a1)`` independently, so the class-0 count over a
    batch is Binomial(n, q) and the proportion has mean ``q`` and standard
    deviation ``sqrt(q * (1 - q) / n)``.

    The binomial variance equals the sum of the two class-0 event-count
    variances plus twice their (negative) covariance.  Flipping that cross
    term's sign gives a strictly larger closed form; see
    :func:`phat_variance_candidates` and the Monte Carlo check in
    :func:`cleam.validation.variance_oracle`, which confirm the binomial
    form is the correct one.
    """
    n = int(n)
    if n < 1:
        raise InvalidInputError(f"batch size n must be >= 1, got {n}")
    _require_binary(p_star, acc)
    if float(p_star.probs.min()) * n < BOUNDARY_MIN_EXPECTED:
        warnings.warn(
            "the rarer class is expected fewer than "
            f"{BOUNDARY_MIN_EXPECTED:.0f} times per batch of {n}; "
            "the Gaussian approximation is unreliable this close to the boundary",
            BoundaryBiasWarning,
            stacklevel=2,
        )
    events = event_probabilities(p_star, acc).p
    q = float(events[0] + events[3])
    return GaussianSpec(mean=q, std=float(np.sqrt(q * (1.0 - q) / n)), n=n)


def phat_variance_candidates(p_star: ClassDistribution, acc: AccuracyProfile, n: int) -> tuple[float, float]:
    """Both closed forms for the variance of the class-0 proportion.

    Returns ``(binomial, positive_cross)`` where ``binomial`` is the exact
    q(1-q)/n and ``positive_cross`` is the variant in which the cross term
    between the two class-0 event counts enters with a positive sign.  The
    two coincide only when one of the event probabilities vanishes (for
    example a perfect classifier).
    """
    n = int(n)
    if n < 1:
        raise InvalidInputError(f"batch size n must be >= 1, got {n}")
    events = event_probabilities(p_star, acc).p
    a, b = float(events[0]), float(events[3])
    binomial = ((a - a * a) + (b - b * b) - 2.0 * a * b) / n
    positive_cross = ((a - a * a) + (b - b * b) + 2.0 * a * b) / n
    return binomial, positive_cross


def multiclass_forward(p_star: ClassDistribution, cm: ConfusionMatrix) -> ClassDistribution:
    """Expected predicted-class distribution ``A @ p_star`` for channel ``A``."""
    if cm.n_classes != p_star.n_classes:
        raise InvalidInputError(
            f"channel has {cm.n_classes} classes but the distribution has {p_star.n_classes}"
        )
    return ClassDistribution(cm.entries @ p_star.probs)
