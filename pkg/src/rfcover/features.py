"""Random features for shift-invariant and linear kernels.

Frequencies are drawn from the spectral law of the target kernel:

==========  ===============================  =============================
kernel      k(x, x')                         frequency law (per unit sigma)
==========  ===============================  =============================
gaussian    exp(-sigma^2 |x - x'|_2^2 / 2)    N(0, sigma^2 I)
linear      <x, x'>                          N(0, I)
laplacian   exp(-sigma |x - x'|_1)            sigma * standard Cauchy
cauchy      prod 1 / (1 + sigma^2 d_l^2)      sigma * standard Laplace
==========  ===============================  =============================

Phases are uniform on ``[0, 2 pi)`` and features are evaluated with the
cosine map ``sqrt(2) cos(nu^T x + b)``.  Orthogonal random features use the
``[cos(nu^T x), sin(nu^T x)]`` pair instead and carry no phase.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

KERNELS = ("gaussian", "linear", "laplacian", "cauchy")
MAPS = ("cosine", "cos_sin_pair", "linear")


@dataclass(frozen=True)
class SpectralFeature:
    nu: tuple[float, ...]
    b: float


@dataclass
class FeatureSet:
    """A batch of sampled features.

    Attributes
    ----------
    nu : np.ndarray
        Frequencies, shape (M, d).
    b : np.ndarray or None
        Phases in ``[0, 2 pi)``, shape (M,).  ``None`` for the cos/sin map.
    kernel : str
        One of :data:`KERNELS`.
    map_kind : str
        One of :data:`MAPS`.
    sigma : float
        Bandwidth the frequencies were drawn with.
    """

    nu: np.ndarray
    b: np.ndarray | None
    kernel: str = "gaussian"
    map_kind: str = "cosine"
    sigma: float = 1.0

    def __post_init__(self):
        self.nu = np.atleast_2d(np.asarray(self.nu, dtype=float))
        if self.b is not None:
            self.b = np.asarray(self.b, dtype=float).reshape(-1)
            if self.b.shape[0] != self.nu.shape[0]:
                raise ValueError("nu and b disagree on the number of features")
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel kind {self.kernel!r}")
        if self.map_kind not in MAPS:
            raise ValueError(f"unknown feature map {self.map_kind!r}")
        if (self.map_kind == "linear") != (self.kernel == "linear"):
            raise ValueError("the linear map goes with the linear kernel only")
        if self.map_kind == "cosine" and self.b is None:
            raise ValueError("the cosine map needs phases")

    def __len__(self):
        return self.nu.shape[0]

    @property
    def dim(self) -> int:
        return self.nu.shape[1]

    @property
    def n_columns(self) -> int:
        return 2 * len(self) if self.map_kind == "cos_sin_pair" else len(self)

    @property
    def features(self) -> list[SpectralFeature]:
        b = self.b if self.b is not None else np.zeros(len(self))
        return [SpectralFeature(tuple(map(float, v)), float(p)) for v, p in zip(self.nu, b)]

    def subset(self, indices) -> "FeatureSet":
        indices = np.asarray(indices, dtype=int)
        b = None if self.b is None else self.b[indices]
        return FeatureSet(self.nu[indices], b, self.kernel, self.map_kind, self.sigma)

    def to_csv(self, path):
        """Write one row per feature: ``nu1, ..., nud, b`` (``b`` blank without phases)."""
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow([f"nu{l + 1}" for l in range(self.dim)] + ["b"])
            for m in range(len(self)):
                b = "" if self.b is None else repr(float(self.b[m]))
                w.writerow([repr(float(v)) for v in self.nu[m]] + [b])

    @classmethod
    def from_csv(cls, path, kernel="gaussian", map_kind="cosine", sigma=1.0) -> "FeatureSet":
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        header, body = rows[0], rows[1:]
        d = len(header) - 1
        nu = np.array([[float(v) for v in r[:d]] for r in body]).reshape(-1, d)
        has_b = all(r[d] != "" for r in body)
        b = np.array([float(r[d]) for r in body]) if has_b else None
        return cls(nu, b, kernel, map_kind, sigma)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_features(kernel: str, sigma: float, M: int, seed=None, d: int = 2) -> FeatureSet:
    """Draw ``M`` i.i.d. features for ``kernel`` (plain random kitchen sinks)."""
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel kind {kernel!r}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    rng = _rng(seed)
    if kernel == "gaussian":
        nu = sigma * rng.standard_normal((M, d))
    elif kernel == "linear":
        nu = rng.standard_normal((M, d))
    elif kernel == "laplacian":
        nu = sigma * rng.standard_cauchy((M, d))
    else:
        nu = sigma * rng.laplace(0.0, 1.0, (M, d))
    b = rng.uniform(0.0, 2 * np.pi, M)
    if kernel == "linear":
        return FeatureSet(nu, b, kernel, "linear", 1.0)
    return FeatureSet(nu, b, kernel, "cosine", sigma)


def _orthogonal_block(rng, d):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    # sign-fix so that R has a nonnegative diagonal, which makes Q unique
    s = np.sign(np.diag(R))
    s[s == 0] = 1.0
    return Q * s


def sample_orf_features(sigma: float, M: int, seed=None, d: int = 2) -> FeatureSet:
    """Orthogonal random features for the Gaussian kernel.

    Rows of independent Haar-orthogonal ``d x d`` blocks are rescaled by
    chi(d) norms so each frequency is marginally ``N(0, sigma^2 I)``.
    """
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    rng = _rng(seed)
    blocks = []
    for _ in range(math.ceil(M / d)):
        Q = _orthogonal_block(rng, d)
        norms = np.sqrt(rng.chisquare(d, size=d))
        blocks.append(norms[:, None] * Q)
    nu = sigma * np.vstack(blocks)[:M]
    return FeatureSet(nu, None, "gaussian", "cos_sin_pair", sigma)


def raw_features(X, fs: FeatureSet) -> np.ndarray:
    """Unnormalised feature map ``[phi(x_i, w_m)]``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != fs.dim:
        raise ValueError(f"data dimension {X.shape[1]} does not match feature dimension {fs.dim}")
    proj = X @ fs.nu.T
    if fs.map_kind == "linear":
        return proj
    if fs.map_kind == "cosine":
        return math.sqrt(2.0) * np.cos(proj + fs.b)
    out = np.empty((X.shape[0], 2 * len(fs)))
    out[:, 0::2] = np.cos(proj)
    out[:, 1::2] = np.sin(proj)
    return out


def transform(X, fs: FeatureSet) -> np.ndarray:
    """Feature matrix ``Z`` with the ``1/sqrt(M)`` normaliser folded in.

    For the cos/sin map, columns ``2m`` and ``2m + 1`` hold the cosine and
    sine of frequency ``m``.
    """
    return raw_features(X, fs) / math.sqrt(len(fs))


def approximate_kernel(x, x_prime, fs: FeatureSet) -> float:
    """Monte-Carlo kernel estimate ``(1/M) sum_m phi(x, w_m) phi(x', w_m)``."""
    a = raw_features(np.reshape(x, (1, -1)), fs)[0]
    c = raw_features(np.reshape(x_prime, (1, -1)), fs)[0]
    return float(np.dot(a, c) / len(fs))
