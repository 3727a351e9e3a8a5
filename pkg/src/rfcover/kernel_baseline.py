"""Exact kernel logistic regression over the full Gram matrix.

The detector is ``f(x) = sum_i alpha_i k(x_i, x) + bias`` with RKHS-norm
penalty ``reg_lambda/2 alpha^T K alpha``.  Training costs O(n^2) memory
and O(n^3) time per Newton iteration; it is the baseline the random
feature models are timed against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import expit

from .classifier import CLASS_ORDER, DEFAULT_BUDGET, DEFAULT_LAMBDA, MultiClassModel, one_vs_rest_labels
from .features import KERNELS
from .optim import newton_descent


def kernel_value(kind: str, x, x_prime, sigma: float = 1.0) -> float:
    """Closed-form kernel between two points."""
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    delta = x - x_prime
    if kind == "gaussian":
        return float(np.exp(-0.5 * sigma**2 * np.dot(delta, delta)))
    if kind == "linear":
        return float(np.dot(x, x_prime))
    if kind == "laplacian":
        return float(np.exp(-sigma * np.abs(delta).sum()))
    if kind == "cauchy":
        return float(np.prod(1.0 / (1.0 + (sigma * delta) ** 2)))
    raise ValueError(f"unknown kernel kind {kind!r}")


def gram_matrix(X, kind: str = "gaussian", sigma: float = 1.0, Y=None) -> np.ndarray:
    """``K[i, j] = k(X[i], Y[j])``; ``Y`` defaults to ``X``."""
    if kind not in KERNELS:
        raise ValueError(f"unknown kernel kind {kind!r}")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = X if Y is None else np.atleast_2d(np.asarray(Y, dtype=float))
    if not (np.isfinite(X).all() and np.isfinite(Y).all()):
        raise ValueError("non-finite coordinates")
    if kind == "gaussian":
        return np.exp(-0.5 * sigma**2 * cdist(X, Y, "sqeuclidean"))
    if kind == "linear":
        return X @ Y.T
    if kind == "laplacian":
        return np.exp(-sigma * cdist(X, Y, "cityblock"))
    K = np.ones((X.shape[0], Y.shape[0]))
    for l in range(X.shape[1]):
        K /= 1.0 + (sigma * (X[:, l, None] - Y[None, :, l])) ** 2
    return K


def kernel_objective(params, K, y, reg_lambda):
    """Mean logistic loss of ``K alpha + bias`` plus ``reg_lambda/2 alpha^T K alpha``."""
    alpha, bias = params[:-1], params[-1]
    Ka = K @ alpha
    margin = y * (Ka + bias)
    n = y.shape[0]
    value = np.logaddexp(0.0, -margin).mean() + 0.5 * reg_lambda * alpha @ Ka
    g = -y * expit(-margin) / n
    grad = np.empty_like(params)
    grad[:-1] = K @ (g + reg_lambda * alpha)
    grad[-1] = g.sum()
    return float(value), grad


def _kernel_newton_step(K, y, reg_lambda):
    n = K.shape[0]
    A = np.empty((n + 1, n + 1))

    def step(params, grad):
        # K-free form of the Newton system: solving
        #   (D K + lam I) da + D 1 db = -r,   1^T D K da + 1^T D 1 db = -g_b
        # with r = g + lam alpha satisfies H d = -grad, and stays well
        # conditioned where K itself is numerically singular.
        alpha, bias = params[:-1], params[-1]
        margin = y * (K @ alpha + bias)
        s = expit(-margin)
        w = s * (1.0 - s) / n
        g = -y * s / n
        A[:n, :n] = w[:, None] * K
        A[:n, :n][np.diag_indices(n)] += reg_lambda
        A[:n, n] = w
        A[n, :n] = w @ K
        A[n, n] = w.sum()
        rhs = np.concatenate([-(g + reg_lambda * alpha), [-grad[-1]]])
        try:
            return np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            return -grad

    return step


@dataclass
class GramModel:
    alpha: np.ndarray
    bias: float
    kernel: str
    sigma: float
    support_points: np.ndarray
    reg_lambda: float = DEFAULT_LAMBDA
    task_class: int | None = None
    history: list = field(default_factory=list, repr=False)
    grad_norm: float = float("nan")
    n_iter: int = 0

    def decision_function(self, X) -> np.ndarray:
        return gram_matrix(X, self.kernel, self.sigma, self.support_points) @ self.alpha + self.bias


def train_kernel_logistic(X, y_binary, reg_lambda=DEFAULT_LAMBDA, opt_budget=DEFAULT_BUDGET, *,
                          kernel="gaussian", sigma=1.0, task_class=None, K=None, gtol=1e-6) -> GramModel:
    """Fit kernel logistic regression with labels in {-1, +1}.

    Pass a precomputed Gram matrix ``K`` to share it across detectors.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y_binary, dtype=float).reshape(-1)
    if X.shape[0] != y.shape[0] or y.shape[0] < 2:
        raise ValueError(f"shape mismatch or too few points: X {X.shape}, y {y.shape}")
    if not np.isin(y, (-1.0, 1.0)).all() or np.unique(y).size < 2:
        raise ValueError("labels must be +-1 with both classes present")
    if K is None:
        K = gram_matrix(X, kernel, sigma)
    res = newton_descent(
        lambda p: kernel_objective(p, K, y, reg_lambda),
        _kernel_newton_step(K, y, reg_lambda),
        np.zeros(X.shape[0] + 1),
        max_iter=opt_budget,
        gtol=gtol,
    )
    return GramModel(res.x[:-1].copy(), float(res.x[-1]), kernel, sigma, X, reg_lambda,
                     task_class, res.history, res.grad_norm, res.n_iter)


def fit_kernel_one_vs_all(X, y, sigma, reg_lambda=DEFAULT_LAMBDA, opt_budget=DEFAULT_BUDGET,
                          kernel="gaussian") -> MultiClassModel:
    K = gram_matrix(X, kernel, sigma)
    models = [
        train_kernel_logistic(X, one_vs_rest_labels(y, cls), reg_lambda, opt_budget,
                              kernel=kernel, sigma=sigma, task_class=cls, K=K)
        for cls in CLASS_ORDER
    ]
    return MultiClassModel(models)
