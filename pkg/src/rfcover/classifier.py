"""Regularised logistic regression on random features, composed one-vs-all."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .features import FeatureSet, transform
from .optim import newton_descent

# argmax ties resolve toward the earlier class in this order
CLASS_ORDER = (1, 0, -1)

DEFAULT_LAMBDA = 1e-6
DEFAULT_BUDGET = 500


def _split(params):
    return params[:-1], params[-1]


def logistic_objective(params, Z, y, reg_lambda):
    """Mean logistic loss plus ``reg_lambda/2 |theta|^2``; bias is unpenalised.

    ``params`` is ``theta`` with the bias appended.  Returns ``(value, grad)``.
    """
    theta, bias = _split(params)
    margin = y * (Z @ theta + bias)
    n = y.shape[0]
    value = np.logaddexp(0.0, -margin).mean() + 0.5 * reg_lambda * theta @ theta
    g = -y * expit(-margin) / n
    grad = np.empty_like(params)
    grad[:-1] = Z.T @ g + reg_lambda * theta
    grad[-1] = g.sum()
    return float(value), grad


def _logistic_newton_step(Z, y, reg_lambda):
    n, M = Z.shape
    A = np.hstack([Z, np.ones((n, 1))])
    ridge = np.full(M + 1, reg_lambda)
    ridge[-1] = 0.0

    def step(params, grad):
        theta, bias = _split(params)
        s = expit(-y * (Z @ theta + bias))
        w = s * (1.0 - s) / n
        H = (A * w[:, None]).T @ A + np.diag(ridge)
        try:
            return -np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            return -np.linalg.lstsq(H, grad, rcond=None)[0]

    return step


def _check_training_input(Z, y):
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if Z.ndim != 2 or Z.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: Z {Z.shape}, y {y.shape}")
    if y.shape[0] < 2:
        raise ValueError("need at least two training points")
    if not np.isin(y, (-1.0, 1.0)).all():
        raise ValueError("binary labels must be +-1")
    if np.unique(y).size < 2:
        raise ValueError("both classes must be present in the training labels")
    if not np.isfinite(Z).all():
        raise ValueError("feature matrix contains non-finite entries")
    return Z, y


@dataclass
class BinaryModel:
    """One binary detector ``f(x) = phi(x)^T theta + bias``.

    With ``features=None`` the model acts directly on precomputed feature
    matrices.
    """

    theta: np.ndarray
    bias: float
    reg_lambda: float = DEFAULT_LAMBDA
    task_class: int | None = None
    features: FeatureSet | None = None
    history: list = field(default_factory=list, repr=False)
    grad_norm: float = float("nan")
    n_iter: int = 0

    def decision_function(self, X) -> np.ndarray:
        Z = np.asarray(X, dtype=float) if self.features is None else transform(X, self.features)
        if Z.shape[1] != self.theta.shape[0]:
            raise ValueError(f"{Z.shape[1]} feature columns for a {self.theta.shape[0]}-weight model")
        return Z @ self.theta + self.bias


def train_binary(Z, y, reg_lambda=DEFAULT_LAMBDA, opt_budget=DEFAULT_BUDGET, *,
                 task_class=None, features=None, gtol=1e-6) -> BinaryModel:
    """Fit logistic regression on feature matrix ``Z`` with labels ``y`` in {-1, +1}."""
    Z, y = _check_training_input(Z, y)
    res = newton_descent(
        lambda p: logistic_objective(p, Z, y, reg_lambda),
        _logistic_newton_step(Z, y, reg_lambda),
        np.zeros(Z.shape[1] + 1),
        max_iter=opt_budget,
        gtol=gtol,
    )
    theta, bias = _split(res.x)
    return BinaryModel(theta.copy(), float(bias), reg_lambda, task_class, features,
                       res.history, res.grad_norm, res.n_iter)


def one_vs_rest_labels(y, cls) -> np.ndarray:
    return np.where(np.asarray(y) == cls, 1.0, -1.0)


def argmax_labels(scores) -> np.ndarray:
    """Map an (n, 3) score array in :data:`CLASS_ORDER` column order to labels."""
    scores = np.asarray(scores, dtype=float)
    return np.asarray(CLASS_ORDER)[np.argmax(scores, axis=1)]


@dataclass
class MultiClassModel:
    """Three binary detectors, one per label, combined by score argmax.

    Any detector exposing ``task_class`` and ``decision_function(X)`` works,
    so the exact-kernel models plug in unchanged.
    """

    models: list

    def __post_init__(self):
        classes = sorted(m.task_class for m in self.models)
        if classes != [-1, 0, 1]:
            raise ValueError(f"need exactly one detector per class, got {classes}")
        self.models = sorted(self.models, key=lambda m: CLASS_ORDER.index(m.task_class))

    def scores(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.column_stack([m.decision_function(X) for m in self.models])

    def predict(self, X) -> np.ndarray:
        return argmax_labels(self.scores(X))


def predict_multiclass(model: MultiClassModel, x) -> int:
    return int(model.predict(np.reshape(x, (1, -1)))[0])


def accuracy(model, X, y=None) -> float:
    """Fraction of correctly predicted labels; ``X`` may be a ``Dataset``."""
    if y is None:
        X, y = X.X, X.y
    y = np.asarray(y)
    if y.shape[0] == 0:
        raise ValueError("cannot score an empty dataset")
    return float(np.mean(model.predict(X) == y))


def fit_one_vs_all(X, y, make_features, reg_lambda=DEFAULT_LAMBDA, opt_budget=DEFAULT_BUDGET):
    """Train one detector per class.

    ``make_features(cls, y_binary)`` returns the :class:`FeatureSet` for the
    detector of class ``cls``; it sees the +-1 labels so data-driven schemes
    can select per task.
    """
    models = []
    for cls in CLASS_ORDER:
        yb = one_vs_rest_labels(y, cls)
        fs = make_features(cls, yb)
        models.append(train_binary(transform(X, fs), yb, reg_lambda, opt_budget,
                                   task_class=cls, features=fs))
    return MultiClassModel(models)


# -- flat text model format ------------------------------------------------------
#
#   rfcover-model 1
#   detectors 3
#   class <label>
#   kernel <kind> map <map_kind> sigma <float> reg_lambda <float>
#   bias <float>
#   theta <float> ...
#   features <M> <d> <has_phase 0|1>
#   <nu_1> ... <nu_d> [<b>]          (M lines)

def save_model(model: MultiClassModel, path):
    lines = ["rfcover-model 1", f"detectors {len(model.models)}"]
    for m in model.models:
        fs = m.features
        if fs is None:
            raise ValueError("only models that carry their feature set can be saved")
        lines.append(f"class {m.task_class}")
        lines.append(f"kernel {fs.kernel} map {fs.map_kind} sigma {fs.sigma!r} reg_lambda {m.reg_lambda!r}")
        lines.append(f"bias {m.bias!r}")
        lines.append("theta " + " ".join(repr(float(t)) for t in m.theta))
        lines.append(f"features {len(fs)} {fs.dim} {int(fs.b is not None)}")
        for i in range(len(fs)):
            row = [repr(float(v)) for v in fs.nu[i]]
            if fs.b is not None:
                row.append(repr(float(fs.b[i])))
            lines.append(" ".join(row))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_model(path) -> MultiClassModel:
    with open(path) as f:
        lines = [ln.split() for ln in f if ln.strip()]
    if lines[0] != ["rfcover-model", "1"]:
        raise ValueError(f"{path}: not an rfcover model file")
    pos = 2
    models = []
    for _ in range(int(lines[1][1])):
        cls = int(lines[pos][1])
        kv = lines[pos + 1]
        meta = dict(zip(kv[0::2], kv[1::2]))
        bias = float(lines[pos + 2][1])
        theta = np.array([float(v) for v in lines[pos + 3][1:]])
        M, d, has_b = (int(v) for v in lines[pos + 4][1:])
        rows = np.array([[float(v) for v in ln] for ln in lines[pos + 5: pos + 5 + M]])
        pos += 5 + M
        b = rows[:, d] if has_b else None
        fs = FeatureSet(rows[:, :d], b, meta["kernel"], meta["map"], float(meta["sigma"]))
        models.append(BinaryModel(theta, bias, float(meta["reg_lambda"]), cls, fs))
    return MultiClassModel(models)
