"""Evaluation arithmetic: normalized errors, fairness discrepancies, diversity conversions."""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from .exceptions import InvalidInputError, MetricUndefinedError
from .types import ClassDistribution, IntervalEstimate

FD_KINDS = ("L1", "L2", "KL")

#: Largest L2 fairness discrepancy a binary distribution can have from the
#: uniform target (attained at [1, 0]).
MAX_BINARY_L2_FD = math.sqrt(0.5)


def point_error(p_star_0: float, estimate: float) -> float:
    """Normalized absolute error |p - estimate| / p."""
    p_star_0 = float(p_star_0)
    if p_star_0 <= 0.0:
        raise MetricUndefinedError("the normalized point error is undefined for a zero reference probability")
    return abs(p_star_0 - float(estimate)) / p_star_0


def interval_error(p_star_0: float, interval: IntervalEstimate) -> float:
    """Normalized worst-case deviation of either interval bound from p."""
    p_star_0 = float(p_star_0)
    if p_star_0 <= 0.0:
        raise MetricUndefinedError("the normalized interval error is undefined for a zero reference probability")
    return max(abs(interval.lower - p_star_0), abs(interval.upper - p_star_0)) / p_star_0


def _as_vector(dist: Any, name: str) -> np.ndarray:
    arr = np.asarray(getattr(dist, "probs", dist), dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be a 1-D distribution, got shape {arr.shape}")
    return arr


def fairness_discrepancy(target: Any, estimate: Any, kind: str = "L2") -> float:
    """Distance from an estimated class distribution to the fair target.

    ``L1`` and ``L2`` are the usual norms of the difference.  ``KL`` is
    ``sum(estimate * log2(estimate / target))`` in bits; a zero entry in the
    estimate (or a target zero that the estimate assigns mass to) signals an
    infinite divergence and returns ``inf``.
    """
    kind = str(kind).upper()
    if kind not in FD_KINDS:
        raise InvalidInputError(f"kind must be one of {FD_KINDS}, got {kind!r}")
    t = _as_vector(target, "target")
    e = _as_vector(estimate, "estimate")
    if t.shape != e.shape:
        raise InvalidInputError(f"dimension mismatch: target has {t.size} classes, estimate has {e.size}")
    if kind == "L1":
        return float(np.abs(t - e).sum())
    if kind == "L2":
        return float(np.linalg.norm(t - e))
    if np.any(e <= 0.0) or np.any(t <= 0.0):
        return math.inf
    return float((e * np.log2(e / t)).sum())


def fd_to_class_prob(f: float) -> tuple[float, float]:
    """Binary class-0 probabilities with L2 discrepancy ``f`` from uniform.

    The L2 discrepancy of [p0, 1-p0] from [0.5, 0.5] is sqrt(2)*|p0 - 0.5|,
    so both preimages are 0.5 -/+ f/sqrt(2).  Feasibility requires
    ``0 <= f <= sqrt(0.5)``; larger values have no probability preimage.
    """
    f = float(f)
    if not 0.0 <= f <= MAX_BINARY_L2_FD + 1e-12:
        raise InvalidInputError(f"f must lie in [0, {MAX_BINARY_L2_FD:.6f}], got {f!r}")
    offset = min(f / math.sqrt(2.0), 0.5)
    return (0.5 - offset, 0.5 + offset)


def relative_improvement(prev: float, proposed: float) -> float:
    """Relative change |prev - proposed| / prev of a measured value."""
    prev = float(prev)
    if prev <= 0.0:
        raise MetricUndefinedError("relative improvement is undefined for a zero previous value")
    return abs(prev - float(proposed)) / prev


def format_percent(fraction: float, digits: int = 2) -> str:
    """Render a fractional error as a percent string, e.g. 0.0498 -> '4.98%'.

    The fraction stays the canonical in-memory and on-disk form; percent
    strings are for human-facing summaries only.
    """
    return f"{float(fraction) * 100:.{digits}f}%"


def diversity_to_phat(delta: float) -> float:
    """Map a diversity score in [-1, 1] to a class-0 proportion (delta + 1) / 2."""
    delta = float(delta)
    if not -1.0 <= delta <= 1.0:
        raise InvalidInputError(f"diversity must lie in [-1, 1], got {delta!r}")
    return (delta + 1.0) / 2.0


def gt_diversity(p_star: ClassDistribution) -> float:
    """Ground-truth diversity p0 - p1 of a binary class distribution."""
    p_star.require_binary()
    return float(p_star.probs[0] - p_star.probs[1])
