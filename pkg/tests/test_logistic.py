import numpy as np
import pytest

from epsbench.errors import NonFiniteFeature
from epsbench.predictors.logistic import train_logistic_readout


def test_intercept_only_matches_base_rate():
    X = np.ones((2000, 1))
    y = (np.arange(2000) < 600).astype(float)
    readout = train_logistic_readout(X, y, l2_lambda=1e-4)
    p = readout.predict_proba(np.ones((1, 1)))[0]
    assert abs(p - 0.3) < 1e-3
    assert readout.converged


def test_separable_data_zero_training_error():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(-2.0, 0.3, (100, 2)), rng.normal(2.0, 0.3, (100, 2))])
    y = np.concatenate([np.zeros(100), np.ones(100)])
    readout = train_logistic_readout(X, y, l2_lambda=1e-4)
    err = np.mean((readout.predict_proba(X) > 0.5) != y)
    assert err == 0.0


def test_objective_decreases_monotonically():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(500, 8))
    y = (X @ rng.normal(size=8) + 0.3 * rng.normal(size=500) > 0).astype(float)
    readout = train_logistic_readout(X, y)
    trace = np.array(readout.objective_trace)
    assert np.all(np.diff(trace) <= 1e-15)
    assert readout.converged


def test_collinear_features_handled():
    rng = np.random.default_rng(3)
    base = rng.integers(0, 2, size=(400, 3)).astype(float)
    X = np.hstack([base, base])  # exact duplicates, as with binary squares
    y = (base.sum(axis=1) > 1.5).astype(float)
    readout = train_logistic_readout(X, y, l2_lambda=1e-4)
    assert readout.converged
    assert np.isfinite(readout.weights).all()


def test_deterministic():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(300, 5))
    y = (rng.random(300) < 0.4).astype(float)
    a = train_logistic_readout(X, y)
    b = train_logistic_readout(X, y)
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


def test_non_finite_features_rejected():
    X = np.ones((10, 2))
    X[3, 1] = np.nan
    with pytest.raises(NonFiniteFeature):
        train_logistic_readout(X, np.zeros(10))
    with pytest.raises(NonFiniteFeature):
        train_logistic_readout(np.ones((4, 1)), np.array([0.0, 1.0, np.inf, 0.0]))


def test_single_class_targets_converge():
    X = np.ones((50, 1))
    readout = train_logistic_readout(X, np.ones(50))
    assert readout.converged
    assert readout.predict_proba(np.ones((1, 1)))[0] > 0.999
