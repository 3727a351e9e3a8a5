"""Repeated-trial comparison of DDRF, RKS, ORF and exact kernel detectors.

Each trial regenerates the sensor field from ``seed + t``, picks the
feature bandwidth with the k-nearest-neighbour heuristic, trains every
(method, M) combination on the train split and scores it on the test
split.  Feature randomness for a (trial, method, M) cell is seeded from
that triple alone, so adding trials never changes earlier ones.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .classifier import DEFAULT_BUDGET, DEFAULT_LAMBDA, accuracy, fit_one_vs_all
from .ddrf import select_from_pool
from .features import sample_features, sample_orf_features, transform
from .kernel_baseline import fit_kernel_one_vs_all
from .scenario import ScenarioConfig, generate_scenario, sigma_heuristic

logger = logging.getLogger(__name__)

METHODS = ("ddrf", "rks", "orf", "kernel")
SUMMARY_FIELDS = ["method", "M", "mean_acc", "stderr", "mean_train_s"]
TRIAL_FIELDS = ["trial", "seed", "method", "M", "accuracy", "train_s", "sigma"]


@dataclass
class BenchConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    M_values: tuple = (4, 8, 12, 16, 20)
    n_trials: int = 30
    pool_multiplier: int = 10
    methods: tuple = METHODS
    knn_k: int = 50
    seed: int = 0
    reg_lambda: float = DEFAULT_LAMBDA
    opt_budget: int = DEFAULT_BUDGET
    output_path: str | None = None

    def __post_init__(self):
        self.M_values = tuple(int(m) for m in self.M_values)
        self.methods = tuple(str(m).lower() for m in self.methods)
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if not self.M_values or min(self.M_values) < 1:
            raise ValueError(f"M_values must be nonempty and positive, got {self.M_values}")
        if self.pool_multiplier < 2:
            raise ValueError(f"pool_multiplier must be >= 2, got {self.pool_multiplier}")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        d = dict(d)
        scenario = ScenarioConfig.from_dict(d.pop("scenario", {}) or {})
        bench = d.pop("bench", {}) or {}
        if d:
            raise ValueError(f"unknown top-level config keys: {sorted(d)}")
        known = {f.name for f in dataclasses.fields(cls)} - {"scenario"}
        unknown = set(bench) - known
        if unknown:
            raise ValueError(f"unknown bench keys: {sorted(unknown)}")
        return cls(scenario=scenario, **bench)


@dataclass
class TrialRecord:
    trial: int
    seed: int
    method: str
    M: int | None
    accuracy: float
    train_s: float
    sigma: float


@dataclass
class ReportRow:
    method: str
    M: int | None
    mean_acc: float
    stderr: float
    mean_train_s: float


@dataclass
class BenchReport:
    rows: list
    trials: list = field(default_factory=list)
    sigmas: list = field(default_factory=list)

    def row(self, method, M=None) -> ReportRow:
        for r in self.rows:
            if r.method == method and r.M == M:
                return r
        raise KeyError((method, M))


def _feature_rng(trial_seed, method, M):
    return np.random.default_rng([trial_seed, METHODS.index(method), M or 0])


def train_method(method, X, y, M, sigma, rng=None, pool_multiplier=10,
                 reg_lambda=DEFAULT_LAMBDA, opt_budget=DEFAULT_BUDGET):
    """Fit a three-class detector with one method; returns ``(model, seconds)``.

    The clock covers feature sampling, selection and optimisation.
    """
    start = time.perf_counter()
    if method == "ddrf":
        pool = sample_features("gaussian", sigma, pool_multiplier * M, rng, d=X.shape[1])
        Z_pool = transform(X, pool)
        model = fit_one_vs_all(X, y, lambda cls, yb: select_from_pool(pool, Z_pool, yb, M).selected,
                               reg_lambda, opt_budget)
    elif method == "rks":
        fs = sample_features("gaussian", sigma, M, rng, d=X.shape[1])
        model = fit_one_vs_all(X, y, lambda cls, yb: fs, reg_lambda, opt_budget)
    elif method == "orf":
        fs = sample_orf_features(sigma, M, rng, d=X.shape[1])
        model = fit_one_vs_all(X, y, lambda cls, yb: fs, reg_lambda, opt_budget)
    elif method == "kernel":
        model = fit_kernel_one_vs_all(X, y, sigma, reg_lambda, opt_budget)
    else:
        raise ValueError(f"unknown method {method!r}")
    return model, time.perf_counter() - start


def run_trial(config: BenchConfig, t: int) -> list[TrialRecord]:
    seed = config.seed + t
    train, test = generate_scenario(config.scenario.replace(rng_seed=seed))
    sigma = sigma_heuristic(train, config.knn_k)
    logger.info("trial %d (seed %d): sigma = %.4f", t, seed, sigma)
    records = []
    for method in config.methods:
        Ms = (None,) if method == "kernel" else config.M_values
        for M in Ms:
            model, secs = train_method(method, train.X, train.y, M, sigma,
                                       _feature_rng(seed, method, M), config.pool_multiplier,
                                       config.reg_lambda, config.opt_budget)
            records.append(TrialRecord(t, seed, method, M, accuracy(model, test), secs, sigma))
    return records


def summarize(records, n_trials) -> list[ReportRow]:
    groups = {}
    for r in records:
        groups.setdefault((r.method, r.M), []).append(r)
    if n_trials == 1:
        logger.warning("single trial: standard errors reported as 0")
    rows = []
    for (method, M), rs in groups.items():
        acc = np.array([r.accuracy for r in rs])
        se = float(np.std(acc, ddof=1) / math.sqrt(len(acc))) if len(acc) > 1 else 0.0
        rows.append(ReportRow(method, M, float(acc.mean()), se, float(np.mean([r.train_s for r in rs]))))
    return rows


def run_benchmark(config: BenchConfig) -> BenchReport:
    records, sigmas = [], []
    for t in range(config.n_trials):
        try:
            trial = run_trial(config, t)
        except Exception as exc:
            raise RuntimeError(f"trial {t} (seed {config.seed + t}) failed: {exc}") from exc
        records.extend(trial)
        sigmas.append(trial[0].sigma)
    return BenchReport(summarize(records, config.n_trials), records, sigmas)


# -- output ----------------------------------------------------------------------

def _fmt_M(M):
    return "" if M is None else str(M)


def _parse_M(s):
    return None if s == "" else int(s)


def write_summary_csv(report: BenchReport, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SUMMARY_FIELDS)
        for r in report.rows:
            w.writerow([r.method, _fmt_M(r.M), repr(r.mean_acc), repr(r.stderr), repr(r.mean_train_s)])


def read_summary_csv(path) -> list[ReportRow]:
    with open(path, newline="") as f:
        return [
            ReportRow(r["method"], _parse_M(r["M"]), float(r["mean_acc"]), float(r["stderr"]),
                      float(r["mean_train_s"]))
            for r in csv.DictReader(f)
        ]


def write_trials_csv(report: BenchReport, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TRIAL_FIELDS)
        for r in report.trials:
            w.writerow([r.trial, r.seed, r.method, _fmt_M(r.M), repr(r.accuracy), repr(r.train_s),
                        repr(r.sigma)])


def format_table(report: BenchReport) -> str:
    """Accuracy table (methods as columns, standard errors in parentheses) plus timings."""
    methods = [m for m in METHODS if any(r.method == m for r in report.rows)]
    Ms = sorted({r.M for r in report.rows if r.M is not None})
    cells = {(r.method, r.M): r for r in report.rows}
    width = 16
    lines = ["M".ljust(6) + "".join(m.upper().rjust(width) for m in methods)]
    for M in Ms:
        line = str(M).ljust(6)
        for m in methods:
            r = cells.get((m, None if m == "kernel" else M))
            line += (f"{r.mean_acc:.3f} ({r.stderr:.4f})" if r else "-").rjust(width)
        lines.append(line)
    lines.append("")
    lines.append("mean train time [s]")
    for r in report.rows:
        label = f"{r.method.upper()}" + ("" if r.M is None else f" M={r.M}")
        lines.append(f"  {label:<12}{r.mean_train_s:10.4f}")
    if report.sigmas:
        lines.append(f"sigma: mean {np.mean(report.sigmas):.4f} over {len(report.sigmas)} trials")
    return "\n".join(lines)


def emit_report(report: BenchReport, out_dir=None, per_trial=True, stream=None) -> dict:
    """Print the table and write ``summary.csv`` (and ``trials.csv``) to ``out_dir``."""
    table = format_table(report)
    if stream is not None:
        print(table, file=stream)
    written = {}
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        written["summary"] = os.path.join(out_dir, "summary.csv")
        write_summary_csv(report, written["summary"])
        if per_trial:
            written["trials"] = os.path.join(out_dir, "trials.csv")
            write_trials_csv(report, written["trials"])
    return written
