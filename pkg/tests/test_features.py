import math

import numpy as np
import pytest
from scipy import integrate, stats

from rfcover.features import (
    FeatureSet,
    approximate_kernel,
    raw_features,
    sample_features,
    sample_orf_features,
    transform,
)
from rfcover.kernel_baseline import kernel_value


def _cos_transform_1d(density, delta):
    """int cos(w * delta) density(w) dw over the real line, by QAWF quadrature."""
    if delta == 0:
        return 2 * integrate.quad(density, 0, np.inf)[0]
    val, _ = integrate.quad(density, 0, np.inf, weight="cos", wvar=abs(delta))
    return 2 * val


@pytest.mark.parametrize(
    "kind, density",
    [
        ("gaussian", lambda w: math.exp(-w * w / 2) / math.sqrt(2 * math.pi)),
        ("laplacian", lambda w: 1.0 / (math.pi * (1 + w * w))),
        ("cauchy", lambda w: 0.5 * math.exp(-abs(w))),
    ],
)
@pytest.mark.parametrize("delta", [(0.0, 0.0), (0.7, -0.3), (1.0, 2.0)])
def test_spectral_law_matches_kernel(kind, density, delta):
    # every law is a product over coordinates, so is its Fourier transform
    expected = np.prod([_cos_transform_1d(density, d) for d in delta])
    assert kernel_value(kind, delta, (0.0, 0.0)) == pytest.approx(expected, rel=1e-7, abs=1e-10)


def test_gaussian_sampler_moments():
    fs = sample_features("gaussian", 1.0, 100_000, seed=0)
    assert fs.nu.shape == (100_000, 2)
    assert np.all(np.abs(fs.nu.mean(axis=0)) < 0.02)
    assert np.all(np.abs(fs.nu.var(axis=0) - 1.0) < 0.02)
    assert np.all((fs.b >= 0) & (fs.b < 2 * np.pi))


def test_laplacian_sampler_median():
    fs = sample_features("laplacian", 1.0, 100_000, seed=1)
    a = np.abs(fs.nu)
    # P(|nu| <= 1) for the standard Cauchy, straight from its CDF
    p_inside = stats.cauchy.cdf(1.0) - stats.cauchy.cdf(-1.0)
    assert p_inside == pytest.approx(0.5)
    assert np.all(np.abs(np.median(a, axis=0) - 1.0) < 0.05)


def test_cauchy_sampler_is_laplace():
    fs = sample_features("cauchy", 1.0, 100_000, seed=2)
    # unit Laplace: E|w| = 1
    assert np.all(np.abs(np.abs(fs.nu).mean(axis=0) - 1.0) < 0.02)


def test_sampler_determinism_and_errors():
    a = sample_features("gaussian", 1.3, 10, seed=42)
    b = sample_features("gaussian", 1.3, 10, seed=42)
    np.testing.assert_array_equal(a.nu, b.nu)
    np.testing.assert_array_equal(a.b, b.b)
    with pytest.raises(ValueError):
        sample_features("polynomial", 1.0, 10)
    with pytest.raises(ValueError):
        sample_features("gaussian", 1.0, 0)
    with pytest.raises(ValueError):
        sample_features("gaussian", -1.0, 5)


def test_orf_blocks_orthogonal():
    fs = sample_orf_features(1.7, 40, seed=3)
    assert fs.map_kind == "cos_sin_pair" and fs.b is None
    for start in range(0, 40, 2):
        u = fs.nu[start:start + 2]
        u = u / np.linalg.norm(u, axis=1, keepdims=True)
        assert abs(u[0] @ u[1]) < 1e-12


def test_orf_odd_count_truncates():
    assert len(sample_orf_features(1.0, 7, seed=0)) == 7


def test_orf_second_moment():
    sigma, d = 1.5, 2
    fs = sample_orf_features(sigma, 10_000, seed=4)
    second = np.mean(np.sum(fs.nu**2, axis=1))
    # chi(d)^2 has mean d
    assert second == pytest.approx(sigma**2 * d, rel=0.03)


def test_transform_origin():
    fs = FeatureSet([[0.3, -2.0], [1.0, 1.0]], [0.0, 0.0])
    Z = transform([[0.0, 0.0]], fs)
    np.testing.assert_allclose(Z, math.sqrt(2) / math.sqrt(2), rtol=0, atol=1e-15)


def test_transform_hand_case():
    fs = FeatureSet([[math.pi, 0.0]], [0.0])
    Z = transform([[1.0, 0.0]], fs)
    assert Z.shape == (1, 1)
    assert Z[0, 0] == pytest.approx(-math.sqrt(2), abs=1e-15)


def test_cosine_entries_bounded():
    fs = sample_features("gaussian", 2.0, 50, seed=5)
    R = raw_features(np.random.default_rng(0).uniform(0, 10, (100, 2)), fs)
    assert np.all(np.abs(R) <= math.sqrt(2) + 1e-15)


def test_cos_sin_pythagoras():
    fs = sample_orf_features(1.0, 9, seed=6)
    X = np.random.default_rng(1).uniform(0, 10, (30, 2))
    Z = transform(X, fs)
    assert Z.shape == (30, 18)
    s = (Z[:, 0::2] ** 2 + Z[:, 1::2] ** 2) * len(fs)
    np.testing.assert_allclose(s, 1.0, atol=1e-12)


def test_linear_map():
    fs = sample_features("linear", 1.0, 3, seed=0)
    assert fs.map_kind == "linear"
    X = np.array([[1.0, 2.0]])
    np.testing.assert_allclose(transform(X, fs), X @ fs.nu.T / math.sqrt(3))


def test_dimension_mismatch():
    fs = sample_features("gaussian", 1.0, 4, seed=0)
    with pytest.raises(ValueError, match="dimension"):
        transform(np.zeros((3, 3)), fs)


def test_featureset_invariants():
    with pytest.raises(ValueError):
        FeatureSet([[1.0, 0.0]], [0.0], kernel="gaussian", map_kind="linear")
    with pytest.raises(ValueError):
        FeatureSet([[1.0, 0.0]], None, kernel="gaussian", map_kind="cosine")


def test_kernel_at_same_point():
    fs = sample_features("gaussian", 1.0, 10_000, seed=7)
    x = np.array([2.0, 3.0])
    assert abs(approximate_kernel(x, x, fs) - 1.0) < 0.03


def test_gaussian_kernel_estimate():
    fs = sample_features("gaussian", 1.0, 10_000, seed=8)
    x, xp = np.array([1.0, 1.0]), np.array([1.6, 1.8])  # |x - x'| = 1
    assert abs(approximate_kernel(x, xp, fs) - math.exp(-0.5)) < 0.03


def test_laplacian_kernel_estimate():
    fs = sample_features("laplacian", 1.0, 10_000, seed=9)
    est = approximate_kernel([0.5, 0.5], [1.5, 0.5], fs)
    assert abs(est - math.exp(-1.0)) < 0.03


def test_cauchy_kernel_estimate():
    fs = sample_features("cauchy", 1.0, 10_000, seed=10)
    est = approximate_kernel([0.0, 0.0], [1.0, 0.5], fs)
    assert abs(est - kernel_value("cauchy", [0.0, 0.0], [1.0, 0.5])) < 0.03


def test_linear_kernel_estimate():
    fs = sample_features("linear", 1.0, 100_000, seed=11)
    x, xp = np.array([0.5, -1.0]), np.array([1.0, 0.3])
    assert abs(approximate_kernel(x, xp, fs) - x @ xp) < 0.02


def test_orf_kernel_estimate():
    sigma = 1.2
    fs = sample_orf_features(sigma, 10_000, seed=12)
    x, xp = np.array([0.0, 0.0]), np.array([0.4, 0.6])
    assert abs(approximate_kernel(x, xp, fs) - kernel_value("gaussian", x, xp, sigma)) < 0.03


def test_error_shrinks_with_M():
    x, xp = np.array([0.2, 0.1]), np.array([0.9, 0.6])
    exact = kernel_value("gaussian", x, xp, 1.0)
    errs = []
    for M in (100, 1_000, 10_000):
        errs.append(np.mean([
            abs(approximate_kernel(x, xp, sample_features("gaussian", 1.0, M, seed=1000 * M + r)) - exact)
            for r in range(50)
        ]))
    assert errs[0] > errs[1] > errs[2]


def test_kernel_estimate_symmetric():
    rng = np.random.default_rng(0)
    for fs in (sample_features("gaussian", 1.0, 300, 1), sample_orf_features(1.0, 300, 2)):
        for _ in range(20):
            x, xp = rng.uniform(0, 10, (2, 2))
            assert approximate_kernel(x, xp, fs) == approximate_kernel(xp, x, fs)


@pytest.mark.parametrize("make", [lambda: sample_features("gaussian", 0.8, 37, 3),
                                  lambda: sample_orf_features(0.8, 37, 4)])
def test_normaliser_bookkeeping(make):
    fs = make()
    X = np.random.default_rng(2).uniform(0, 10, (12, 2))
    Z = transform(X, fs)
    G = np.array([[approximate_kernel(a, c, fs) for c in X] for a in X])
    np.testing.assert_allclose(Z @ Z.T, G, rtol=0, atol=1e-12)


def test_featureset_csv_roundtrip(tmp_path):
    fs = sample_features("gaussian", 1.1, 6, seed=0)
    path = tmp_path / "fs.csv"
    fs.to_csv(path)
    assert path.read_text().splitlines()[0] == "nu1,nu2,b"
    back = FeatureSet.from_csv(path, sigma=1.1)
    np.testing.assert_array_equal(back.nu, fs.nu)
    np.testing.assert_array_equal(back.b, fs.b)

    orf = sample_orf_features(1.1, 4, seed=0)
    orf.to_csv(path)
    back = FeatureSet.from_csv(path, map_kind="cos_sin_pair")
    assert back.b is None
    np.testing.assert_array_equal(back.nu, orf.nu)
