"""Synthetic two-base-station sensor fields.

Sensors are scattered uniformly over the square ``[0, L]^2``.  Each base
station owns a star-shaped coverage region whose radius is a base radius
perturbed by a few cosine harmonics in the polar angle.  Ground-truth labels
are ``+1`` (BS1 coverage), ``-1`` (BS2 coverage) and ``0`` (neither).
Declarations are corrupted near the boundaries: a point at distance ``m``
from the nearest boundary curve is relabelled with probability
``label_noise_rate * exp(-m / noise_decay_length)``.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import yaml
from scipy.spatial import cKDTree

LABELS = (1, 0, -1)

# angular resolution used for boundary polylines and the radius positivity check
_BOUNDARY_SAMPLES = 4096


class LabeledPoint(NamedTuple):
    x: tuple[float, float]
    y: int


def _default_harmonics():
    return (
        ((0.22, 3, 0.0), (0.12, 5, 1.3)),
        ((0.15, 2, 0.6), (0.09, 4, 2.1), (0.05, 7, 0.4)),
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Geometry, sizes, noise and seed of a synthetic sensor field.

    ``boundary_harmonics[k]`` is a sequence of ``(amplitude, frequency,
    phase)`` triples for base station ``k``.
    """

    field_side: float = 10.0
    n_train: int = 2000
    n_test: int = 1000
    bs_centers: tuple = ((3.3, 5.0), (7.2, 5.2))
    base_radius: tuple = (3.0, 2.4)
    boundary_harmonics: tuple = field(default_factory=_default_harmonics)
    label_noise_rate: float = 0.4
    noise_decay_length: float = 0.25
    rng_seed: int = 0

    def __post_init__(self):
        # normalise nested lists (e.g. from YAML) into tuples so configs hash
        set_ = object.__setattr__
        set_(self, "bs_centers", tuple(tuple(float(v) for v in c) for c in self.bs_centers))
        set_(self, "base_radius", tuple(float(r) for r in self.base_radius))
        set_(
            self,
            "boundary_harmonics",
            tuple(tuple(tuple(float(v) for v in h) for h in hs) for hs in self.boundary_harmonics),
        )
        self.validate()

    def validate(self):
        if self.n_train < 1:
            raise ValueError(f"n_train must be >= 1, got {self.n_train}")
        if self.n_test < 0:
            raise ValueError(f"n_test must be >= 0, got {self.n_test}")
        if not self.field_side > 0:
            raise ValueError(f"field_side must be positive, got {self.field_side}")
        if len(self.bs_centers) != 2 or len(self.base_radius) != 2 or len(self.boundary_harmonics) != 2:
            raise ValueError("exactly two base stations are supported")
        for c in self.bs_centers:
            if len(c) != 2 or not all(0.0 <= v <= self.field_side for v in c):
                raise ValueError(f"base station center {c} outside the field")
        if not all(r > 0 for r in self.base_radius):
            raise ValueError(f"base_radius must be positive, got {self.base_radius}")
        for hs in self.boundary_harmonics:
            if any(len(h) != 3 for h in hs):
                raise ValueError("harmonics must be (amplitude, frequency, phase) triples")
        if not 0.0 <= self.label_noise_rate <= 1.0:
            raise ValueError(f"label_noise_rate must lie in [0, 1], got {self.label_noise_rate}")
        if not self.noise_decay_length > 0:
            raise ValueError(f"noise_decay_length must be positive, got {self.noise_decay_length}")
        phi = np.linspace(0.0, 2 * np.pi, _BOUNDARY_SAMPLES, endpoint=False)
        for k in range(2):
            r = boundary_radius(self, k, phi)
            if np.min(r) <= 0:
                raise ValueError(
                    f"boundary radius of base station {k + 1} is not positive for all angles "
                    f"(min {np.min(r):.4g})"
                )

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["bs_centers"] = [list(c) for c in self.bs_centers]
        d["base_radius"] = list(self.base_radius)
        d["boundary_harmonics"] = [[list(h) for h in hs] for hs in self.boundary_harmonics]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class Dataset:
    """Sensor locations ``X`` (n x 2) with declarations ``y`` in {-1, 0, +1}.

    ``clean_y`` and ``flip_prob`` are the ground-truth labels and per-point
    corruption probabilities when the dataset came from the generator.
    """

    X: np.ndarray
    y: np.ndarray
    split: str = "train"
    clean_y: np.ndarray | None = None
    flip_prob: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise ValueError(f"shape mismatch: X {self.X.shape}, y {self.y.shape}")
        if not np.isin(self.y, LABELS).all():
            raise ValueError("labels must lie in {-1, 0, +1}")

    def __len__(self):
        return self.X.shape[0]

    @property
    def points(self) -> list[LabeledPoint]:
        return [LabeledPoint((float(a), float(b)), int(c)) for (a, b), c in zip(self.X, self.y)]

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["x1", "x2", "y"])
            for (a, b), c in zip(self.X, self.y):
                w.writerow([repr(float(a)), repr(float(b)), int(c)])

    @classmethod
    def from_csv(cls, path, split="train") -> "Dataset":
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))
        X = np.array([[float(r["x1"]), float(r["x2"])] for r in rows]).reshape(-1, 2)
        y = np.array([int(r["y"]) for r in rows], dtype=int)
        return cls(X, y, split)


def load_config(path) -> dict:
    """Read a YAML config file into a plain dict."""
    with open(path) as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping at top level")
    return data


def boundary_radius(config: ScenarioConfig, k: int, phi) -> np.ndarray:
    """Radius of base station ``k``'s coverage boundary at polar angle ``phi``."""
    phi = np.asarray(phi, dtype=float)
    r = np.full_like(phi, config.base_radius[k])
    for amp, freq, phase in config.boundary_harmonics[k]:
        r = r + amp * np.cos(freq * phi + phase)
    return r


def coverage_margins(config: ScenarioConfig, X) -> np.ndarray:
    """Radial margins ``r_k(phi) - |x - c_k|``, shape (n, 2); >= 0 means covered."""
    X = np.asarray(X, dtype=float)
    out = np.empty((X.shape[0], 2))
    for k, c in enumerate(config.bs_centers):
        dx = X - np.asarray(c)
        phi = np.arctan2(dx[:, 1], dx[:, 0])
        out[:, k] = boundary_radius(config, k, phi) - np.hypot(dx[:, 0], dx[:, 1])
    return out


def ground_truth_labels(config: ScenarioConfig, X) -> np.ndarray:
    margins = coverage_margins(config, X)
    covered = margins >= 0
    # both covered: larger margin wins, exact ties go to BS1
    bs1 = covered[:, 0] & (~covered[:, 1] | (margins[:, 0] >= margins[:, 1]))
    bs2 = covered[:, 1] & ~bs1
    y = np.zeros(X.shape[0], dtype=int)
    y[bs1] = 1
    y[bs2] = -1
    return y


def boundary_polyline(config: ScenarioConfig, k: int, n_samples: int = _BOUNDARY_SAMPLES) -> np.ndarray:
    phi = np.linspace(0.0, 2 * np.pi, n_samples, endpoint=False)
    r = boundary_radius(config, k, phi)
    c = np.asarray(config.bs_centers[k])
    return c + r[:, None] * np.column_stack([np.cos(phi), np.sin(phi)])


def boundary_distance(config: ScenarioConfig, X) -> np.ndarray:
    """Euclidean distance from each point to the nearest of the two boundary curves."""
    curve = np.vstack([boundary_polyline(config, k) for k in range(2)])
    dist, _ = cKDTree(curve).query(np.asarray(X, dtype=float))
    return dist


def generate_scenario(config: ScenarioConfig) -> tuple[Dataset, Dataset]:
    """Draw train and test sensor fields; deterministic in ``config.rng_seed``."""
    config.validate()
    rng = np.random.default_rng(config.rng_seed)
    n = config.n_train + config.n_test
    X = rng.uniform(0.0, config.field_side, size=(n, 2))
    clean = ground_truth_labels(config, X)

    margin = boundary_distance(config, X)
    p_flip = config.label_noise_rate * np.exp(-margin / config.noise_decay_length)
    flip = rng.uniform(size=n) < p_flip
    # shift to one of the two other labels, uniformly
    offset = rng.integers(1, 3, size=n)
    label_pos = np.array([LABELS.index(v) for v in clean]) if n else np.zeros(0, int)
    noisy_pos = np.where(flip, (label_pos + offset) % 3, label_pos)
    y = np.asarray(LABELS)[noisy_pos]

    tr, te = slice(0, config.n_train), slice(config.n_train, n)
    train = Dataset(X[tr], y[tr], "train", clean[tr], p_flip[tr])
    test = Dataset(X[te], y[te], "test", clean[te], p_flip[te])
    return train, test


def sigma_heuristic(X, k: int = 50) -> float:
    """Inverse of the mean distance to each point's ``k``-th nearest neighbour."""
    X = np.asarray(X.X if isinstance(X, Dataset) else X, dtype=float)
    n = X.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n <= k:
        raise ValueError(f"need more than k={k} points, got {n}")
    # first neighbour returned is the point itself
    dist, _ = cKDTree(X).query(X, k=k + 1)
    return float(1.0 / np.mean(dist[:, k]))


def disk_config(
    centers: Sequence = ((3.0, 5.0), (7.5, 5.0)),
    radii: Sequence = (2.0, 1.5),
    **kwargs,
) -> ScenarioConfig:
    """Noiseless two-disk configuration, handy for sanity checks."""
    return ScenarioConfig(
        bs_centers=tuple(centers),
        base_radius=tuple(radii),
        boundary_harmonics=((), ()),
        label_noise_rate=0.0,
        **kwargs,
    )
