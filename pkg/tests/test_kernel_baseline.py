import numpy as np
import pytest

from rfcover.classifier import accuracy
from rfcover.features import sample_features, transform
from rfcover.kernel_baseline import (
    fit_kernel_one_vs_all,
    gram_matrix,
    kernel_objective,
    kernel_value,
    train_kernel_logistic,
)
from rfcover.scenario import disk_config, generate_scenario

from oracles import central_diff


@pytest.mark.parametrize("kind", ["gaussian", "laplacian", "cauchy", "linear"])
def test_gram_matches_scalar_oracle(kind):
    X = np.random.default_rng(0).uniform(0, 3, (5, 2))
    K = gram_matrix(X, kind, 1.3)
    oracle = np.array([[kernel_value(kind, a, b, 1.3) for b in X] for a in X])
    np.testing.assert_allclose(K, oracle, rtol=1e-14, atol=1e-15)


def test_gaussian_gram_diag_and_symmetry():
    X = np.random.default_rng(1).uniform(0, 10, (40, 2))
    K = gram_matrix(X, "gaussian", 0.9)
    np.testing.assert_array_equal(np.diag(K), 1.0)
    np.testing.assert_allclose(K, K.T, rtol=0, atol=1e-12)


def test_gaussian_closed_form():
    assert kernel_value("gaussian", [0, 0], [1, 0], 2.0) == pytest.approx(np.exp(-2.0))


@pytest.mark.parametrize("n", [10, 50, 200])
def test_gram_psd(n):
    X = np.random.default_rng(n).uniform(0, 10, (n, 2))
    for kind in ("gaussian", "laplacian", "cauchy"):
        K = gram_matrix(X, kind, 1.0)
        assert np.linalg.eigvalsh(K + 1e-9 * np.eye(n)).min() >= 0


def test_random_feature_gram_approximates_kernel():
    X = np.random.default_rng(3).uniform(0, 3, (50, 2))
    fs = sample_features("gaussian", 1.0, 10_000, seed=4)
    Z = transform(X, fs)
    assert np.max(np.abs(Z @ Z.T - gram_matrix(X, "gaussian", 1.0))) <= 0.05


def test_gram_rejects_nonfinite():
    with pytest.raises(ValueError):
        gram_matrix(np.array([[0.0, np.inf]]))
    with pytest.raises(ValueError):
        gram_matrix(np.zeros((2, 2)), "sinc")


def _toy(n=30, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(0, 4, (n, 2))
    y = np.where(X[:, 0] + 0.3 * np.sin(3 * X[:, 1]) < 2, 1.0, -1.0)
    return X, y


def test_toy_fits_exactly():
    X, y = _toy()
    model = train_kernel_logistic(X, y, sigma=1.0)
    assert np.mean(np.sign(model.decision_function(X)) == y) == 1.0
    assert np.all(np.diff(model.history) <= 0)
    assert model.grad_norm <= 1e-6


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_finite_differences(seed):
    X, y = _toy(seed=seed)
    K = gram_matrix(X, "gaussian", 1.0)
    p = np.random.default_rng(seed).normal(size=X.shape[0] + 1)
    _, g = kernel_objective(p, K, y, 1e-2)
    fd = central_diff(lambda q: kernel_objective(q, K, y, 1e-2)[0], p)
    assert np.max(np.abs(fd - g) / np.maximum(np.abs(g), 1e-8)) <= 1e-5


def test_input_validation():
    X, _ = _toy()
    with pytest.raises(ValueError):
        train_kernel_logistic(X, np.ones(30))
    with pytest.raises(ValueError):
        train_kernel_logistic(X, np.ones(29))


def test_one_vs_all_on_clean_disks():
    train, test = generate_scenario(disk_config(n_train=400, n_test=200, rng_seed=2))
    model = fit_kernel_one_vs_all(train.X, train.y, sigma=1.0)
    assert accuracy(model, test) >= 0.95
