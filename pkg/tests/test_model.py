import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cleam import (
    AccuracyProfile,
    BoundaryBiasWarning,
    ClassDistribution,
    ConfusionMatrix,
    InvalidInputError,
    covariance_matrix,
    event_probabilities,
    multiclass_forward,
    phat_distribution,
    phat_variance_candidates,
    simulate_proportion_matrix,
    substream,
)

GENDER = AccuracyProfile([0.976, 0.979])
BLACKHAIR = AccuracyProfile([0.881, 0.887])

probs = st.floats(0.02, 0.98)
accuracies = st.floats(0.55, 1.0)


def test_event_probabilities_hand_example():
    # Four products of p* = [0.9, 0.1] with alpha = [0.976, 0.979], by hand:
    # 0.9*0.976, 0.9*0.024, 0.1*0.979, 0.1*0.021.
    events = event_probabilities(ClassDistribution.binary(0.9), GENDER)
    np.testing.assert_allclose(events.p, [0.8784, 0.0216, 0.0979, 0.0021], atol=1e-12)


def test_event_probabilities_perfect_classifier():
    events = event_probabilities(ClassDistribution.binary(0.5), AccuracyProfile([1.0, 1.0]))
    np.testing.assert_allclose(events.p, [0.5, 0.0, 0.5, 0.0], atol=0)


def test_event_probabilities_rejects_non_binary():
    with pytest.raises(InvalidInputError):
        event_probabilities(ClassDistribution([0.5, 0.3, 0.2]), GENDER)
    with pytest.raises(InvalidInputError):
        event_probabilities(ClassDistribution.binary(0.5), AccuracyProfile([0.9, 0.9, 0.9]))


@given(probs, accuracies, accuracies)
def test_event_probabilities_sum_to_one(p0, a0, a1):
    events = event_probabilities(ClassDistribution.binary(p0), AccuracyProfile([a0, a1]))
    assert abs(float(events.p.sum()) - 1.0) < 1e-12


def test_covariance_entry_hand_example():
    # M[0][3] = -p1 * p4 = -0.8784 * 0.0021 for the gender example.
    m = covariance_matrix(ClassDistribution.binary(0.9), GENDER)
    assert m[0][3] == pytest.approx(-0.8784 * 0.0021, abs=1e-15)
    assert m[0][3] == pytest.approx(-1.84464e-3, abs=1e-8)


def test_covariance_degenerate_distribution_is_zero():
    # One event probability of 1 makes every entry vanish.
    m = covariance_matrix(ClassDistribution([1.0, 0.0]), AccuracyProfile([1.0, 1.0]))
    np.testing.assert_allclose(m, np.zeros((4, 4)), atol=1e-15)


@given(probs, accuracies, accuracies)
def test_covariance_rows_sum_to_zero_and_symmetric(p0, a0, a1):
    m = covariance_matrix(ClassDistribution.binary(p0), AccuracyProfile([a0, a1]))
    np.testing.assert_allclose(m.sum(axis=1), np.zeros(4), atol=1e-12)
    np.testing.assert_allclose(m, m.T, atol=0)


def test_phat_mean_matches_reference_rows():
    # mu = p0*a0 + p1*(1 - a1) for the two tabulated channels.
    spec = phat_distribution(ClassDistribution.binary(0.9), GENDER, 400)
    assert spec.mean == pytest.approx(0.8805, abs=1e-12)
    spec = phat_distribution(ClassDistribution.binary(0.643), AccuracyProfile([0.869, 0.885]), 400)
    assert spec.mean == pytest.approx(0.643 * 0.869 + 0.357 * 0.115, abs=1e-12)
    assert spec.mean == pytest.approx(0.599, abs=1e-3)


def test_phat_distribution_perfect_classifier():
    spec = phat_distribution(ClassDistribution.binary(0.7), AccuracyProfile([1.0, 1.0]), 100)
    assert spec.mean == pytest.approx(0.7)
    assert spec.std == pytest.approx(np.sqrt(0.7 * 0.3 / 100))


def test_phat_distribution_rejects_zero_batch():
    with pytest.raises(InvalidInputError):
        phat_distribution(ClassDistribution.binary(0.5), GENDER, 0)


def test_phat_distribution_warns_near_boundary():
    with pytest.warns(BoundaryBiasWarning):
        phat_distribution(ClassDistribution.binary(0.999), GENDER, 400)


@given(probs, accuracies, accuracies, st.integers(1, 10_000))
@pytest.mark.filterwarnings("ignore::cleam.model.BoundaryBiasWarning")
def test_gaussian_mean_identity(p0, a0, a1, n):
    # mean == p0*(a0 - (1 - a1)) + (1 - a1), the affine form the estimators invert.
    spec = phat_distribution(ClassDistribution.binary(p0), AccuracyProfile([a0, a1]), n)
    assert spec.mean == pytest.approx(p0 * (a0 - (1 - a1)) + (1 - a1), abs=1e-12)


@settings(max_examples=25)
@given(probs, accuracies, accuracies)
def test_variance_candidates_bracket_and_binomial_consistency(p0, a0, a1):
    spec = phat_distribution(ClassDistribution.binary(p0), AccuracyProfile([a0, a1]), 400)
    binomial, positive_cross = phat_variance_candidates(ClassDistribution.binary(p0), AccuracyProfile([a0, a1]), 400)
    assert binomial == pytest.approx(spec.variance, abs=1e-15)
    assert positive_cross >= binomial


def test_monte_carlo_agreement_with_model_moments():
    # Empirical mean within 3 standard errors, variance within 5% relative,
    # over 1e5 simulated batches.
    p_star, acc, n, batches = ClassDistribution.binary(0.7), BLACKHAIR, 400, 100_000
    spec = phat_distribution(p_star, acc, n)
    phat0 = simulate_proportion_matrix(p_star, acc, n, batches, substream(314, 0))[:, 0]
    se = spec.std / np.sqrt(batches)
    assert abs(phat0.mean() - spec.mean) < 3 * se
    assert abs(phat0.var(ddof=1) - spec.variance) / spec.variance < 0.05


def test_multiclass_forward_identity():
    p = ClassDistribution([0.5, 0.3, 0.2])
    assert np.allclose(multiclass_forward(p, ConfusionMatrix(np.eye(3))).probs, p.probs)


def test_multiclass_forward_hand_example():
    cm = ConfusionMatrix([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]])
    out = multiclass_forward(ClassDistribution([0.5, 0.3, 0.2]), cm)
    np.testing.assert_allclose(out.probs, [0.45, 0.31, 0.24], atol=1e-12)


@given(probs, accuracies, accuracies)
@pytest.mark.filterwarnings("ignore::cleam.model.BoundaryBiasWarning")
def test_multiclass_forward_reduces_to_binary_mean(p0, a0, a1):
    acc = AccuracyProfile([a0, a1])
    p_star = ClassDistribution.binary(p0)
    forward = multiclass_forward(p_star, ConfusionMatrix.from_accuracy(acc))
    assert float(forward.probs[0]) == pytest.approx(phat_distribution(p_star, acc, 100).mean, abs=1e-12)


def test_multiclass_forward_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        multiclass_forward(ClassDistribution.binary(0.5), ConfusionMatrix(np.eye(3)))
