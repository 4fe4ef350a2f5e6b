import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from cleam import (
    BaselineEstimator,
    BbseEstimator,
    CleamEstimator,
    DegenerateClassifierError,
    InvalidInputError,
    MulticlassCleamEstimator,
    check_proportions,
)

SERIES = np.full(30, 0.61)


def test_check_proportions_promotes_1d():
    arr = check_proportions([0.6, 0.4])
    assert arr.shape == (2, 2)
    np.testing.assert_allclose(arr[:, 0] + arr[:, 1], 1.0)


def test_check_proportions_rejects_bad_rows():
    with pytest.raises(InvalidInputError):
        check_proportions([[0.6, 0.3], [0.5, 0.5]])
    with pytest.raises(InvalidInputError):
        check_proportions([0.6])
    with pytest.raises(InvalidInputError):
        check_proportions([0.6, 1.4])


def test_baseline_estimator_predict():
    est = BaselineEstimator().fit()
    np.testing.assert_allclose(est.predict(SERIES), [0.61, 0.39])
    interval = est.predict_interval(SERIES)
    assert interval.lower == pytest.approx(0.61)
    assert interval.upper == pytest.approx(0.61)


def test_cleam_estimator_matches_reference_value():
    est = CleamEstimator(alpha=[0.947, 0.983]).fit()
    prevalence = est.predict(SERIES)
    assert prevalence[0] == pytest.approx(0.638, abs=1e-3)
    assert prevalence.sum() == pytest.approx(1.0)


def test_cleam_estimator_interval():
    rng = np.random.default_rng(0)
    x = np.clip(rng.normal(0.61, 0.01, size=30), 0, 1)
    est = CleamEstimator(alpha=[0.947, 0.983]).fit()
    interval = est.predict_interval(x)
    point = est.predict(x)[0]
    assert interval.lower <= point <= interval.upper


def test_cleam_estimator_requires_fit():
    with pytest.raises(NotFittedError):
        CleamEstimator(alpha=[0.9, 0.9]).predict(SERIES)


def test_cleam_estimator_rejects_degenerate_alpha_on_predict():
    est = CleamEstimator(alpha=[0.3, 0.7]).fit()
    with pytest.raises(DegenerateClassifierError):
        est.predict(SERIES)


def test_estimators_clone_and_get_params():
    est = CleamEstimator(alpha=[0.9, 0.8], confidence=0.9)
    params = est.get_params()
    assert params["alpha"] == [0.9, 0.8]
    assert params["confidence"] == 0.9
    cloned = clone(est)
    assert cloned.get_params() == params


def test_multiclass_estimator_round_trip():
    matrix = np.array([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]])
    est = MulticlassCleamEstimator(confusion=matrix).fit()
    p_star = np.array([0.5, 0.3, 0.2])
    observed = np.tile(matrix @ p_star, (5, 1))
    np.testing.assert_allclose(est.predict(observed), p_star, atol=1e-9)
    assert est.condition_number_ == pytest.approx(np.linalg.cond(matrix))


def test_bbse_estimator_identity_channel():
    est = BbseEstimator(confusion=np.eye(2)).fit()
    observed = np.tile([0.7, 0.3], (4, 1))
    np.testing.assert_allclose(est.predict(observed), [0.7, 0.3], atol=1e-12)


def test_bbse_estimator_matches_multiclass_in_binary():
    matrix = np.array([[0.947, 0.017], [0.053, 0.983]])
    observed = np.tile([0.61, 0.39], (6, 1))
    direct = MulticlassCleamEstimator(confusion=matrix).fit().predict(observed)
    shifted = BbseEstimator(confusion=matrix).fit().predict(observed)
    np.testing.assert_allclose(shifted, direct, atol=1e-10)
