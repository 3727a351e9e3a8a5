"""Data-driven random feature selection.

A pool of ``M0`` Gaussian features is scored against a +-1 label vector
``y`` by the energy weight

    q_i = [Z^T y y^T Z]_ii / tr(Z^T y y^T Z),

and the ``M`` highest-scoring features are kept.  Because ``Z^T y y^T Z``
is rank one, ``q_i = v_i^2 / |v|^2`` with ``v = Z^T y``; the ``M0 x M0``
matrix is never formed.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .features import FeatureSet, sample_features, transform

logger = logging.getLogger(__name__)


class DegenerateScoreError(ValueError):
    """All pool scores vanish (``Z^T y = 0``), so the weights are undefined."""


@dataclass
class ScoredPool:
    pool: FeatureSet | None
    weights: np.ndarray
    labels: np.ndarray


@dataclass
class SelectedFeatures:
    selected: FeatureSet | None
    indices: np.ndarray
    weights: np.ndarray | None = None


def _check_binary(y, n):
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != n:
        raise ValueError(f"label vector has {y.shape[0]} entries, feature matrix has {n} rows")
    if not np.isin(y, (-1.0, 1.0)).all():
        raise ValueError("labels must be +-1")
    return y


def score_pool(Z, y, pool: FeatureSet | None = None) -> ScoredPool:
    """Energy weights of every pool column of ``Z`` against labels ``y``.

    Raises
    ------
    DegenerateScoreError
        If ``Z^T y`` is identically zero.
    """
    Z = np.asarray(Z, dtype=float)
    y = _check_binary(y, Z.shape[0])
    v = Z.T @ y
    energy = v * v
    total = energy.sum()
    if not total > 0:
        raise DegenerateScoreError("all feature scores are zero")
    return ScoredPool(pool, energy / total, y)


def select_top(weights, M: int) -> np.ndarray:
    """Indices of the ``M`` largest weights, largest first; ties keep pool order."""
    if isinstance(weights, ScoredPool):
        weights = weights.weights
    weights = np.asarray(weights, dtype=float)
    M0 = weights.shape[0]
    if not 1 <= M < M0:
        raise ValueError(f"need 1 <= M < M0, got M={M}, M0={M0}")
    order = np.argsort(-weights, kind="stable")
    return order[:M]


def select_from_pool(pool: FeatureSet, Z_pool, y, M: int) -> SelectedFeatures:
    """Score a transformed pool against ``y`` and keep the top ``M`` features.

    Falls back to the first ``M`` pool features if every score vanishes.
    """
    try:
        scored = score_pool(Z_pool, y, pool)
        weights = scored.weights
        idx = select_top(weights, M)
    except DegenerateScoreError:
        logger.warning("degenerate feature scores; falling back to the first %d pool features", M)
        weights = np.full(len(pool), 1.0 / len(pool))
        idx = select_top(weights, M)
    return SelectedFeatures(pool.subset(idx), idx, weights)


def ddrf_pipeline(X, y_binary, M: int, M0: int, sigma: float, seed=None):
    """Sample a Gaussian pool of size ``M0``, keep the best ``M`` for ``y_binary``.

    Returns the selection and the ``n x M`` matrix rebuilt over the selected
    features with its own ``1/sqrt(M)`` normaliser.
    """
    if not 1 <= M < M0:
        raise ValueError(f"need 1 <= M < M0, got M={M}, M0={M0}")
    pool = sample_features("gaussian", sigma, M0, seed, d=np.shape(X)[1])
    sel = select_from_pool(pool, transform(X, pool), y_binary, M)
    return sel, transform(X, sel.selected)


def write_selection_csv(path, weights, indices):
    """Dump ``pool_index,weight,selected`` for every pool member."""
    chosen = set(int(i) for i in indices)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["pool_index", "weight", "selected"])
        for i, q in enumerate(weights):
            w.writerow([i, repr(float(q)), int(i in chosen)])
