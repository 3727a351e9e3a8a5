"""Command line entry point: ``rfcover {bench,generate,train}``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .bench import METHODS, BenchConfig, emit_report, run_benchmark, train_method
from .classifier import accuracy, save_model
from .scenario import ScenarioConfig, generate_scenario, load_config, sigma_heuristic


def _int_list(s):
    return tuple(int(v) for v in s.split(",") if v.strip())


def _str_list(s):
    return tuple(v.strip().lower() for v in s.split(",") if v.strip())


def _load(args) -> BenchConfig:
    cfg = BenchConfig.from_dict(load_config(args.config)) if args.config else BenchConfig()
    overrides = {}
    if getattr(args, "methods", None):
        overrides["methods"] = args.methods
    if getattr(args, "m", None):
        overrides["M_values"] = args.m
    if getattr(args, "trials", None):
        overrides["n_trials"] = args.trials
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "out", None):
        overrides["output_path"] = args.out
    return BenchConfig(**{**cfg.__dict__, **overrides}) if overrides else cfg


def cmd_bench(args):
    cfg = _load(args)
    report = run_benchmark(cfg)
    written = emit_report(report, cfg.output_path, per_trial=True, stream=sys.stdout)
    if args.timing:
        print("\ntraining time relative to KERNEL")
        try:
            kernel_s = report.row("kernel").mean_train_s
        except KeyError:
            kernel_s = None
        for r in report.rows:
            if kernel_s and r.method != "kernel":
                print(f"  {r.method.upper():<6} M={r.M:<4} {r.mean_train_s / kernel_s:8.3f}")
    for name, path in written.items():
        print(f"wrote {name}: {path}")


def cmd_generate(args):
    cfg = ScenarioConfig.from_dict(load_config(args.config).get("scenario", {}) or {}) if args.config \
        else ScenarioConfig()
    if args.seed is not None:
        cfg = cfg.replace(rng_seed=args.seed)
    train, test = generate_scenario(cfg)
    train.to_csv(args.out)
    print(f"wrote {len(train)} training points to {args.out}")
    if args.test_out:
        test.to_csv(args.test_out)
        print(f"wrote {len(test)} test points to {args.test_out}")


def cmd_train(args):
    cfg = _load(args)
    seed = cfg.seed
    train, test = generate_scenario(cfg.scenario.replace(rng_seed=seed))
    sigma = args.sigma or sigma_heuristic(train, cfg.knn_k)
    rng = np.random.default_rng([seed, METHODS.index(args.method), args.m_single or 0])
    model, secs = train_method(args.method, train.X, train.y, args.m_single, sigma, rng,
                               cfg.pool_multiplier, cfg.reg_lambda, cfg.opt_budget)
    print(f"method={args.method} M={args.m_single} sigma={sigma:.4f} "
          f"train_acc={accuracy(model, train):.4f} test_acc={accuracy(model, test):.4f} "
          f"train_s={secs:.4f}")
    if args.save_model:
        save_model(model, args.save_model)
        print(f"wrote model to {args.save_model}")


def build_parser():
    p = argparse.ArgumentParser(prog="rfcover", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="repeated-trial method comparison")
    b.add_argument("--config")
    b.add_argument("--methods", type=_str_list)
    b.add_argument("--m", type=_int_list, help="comma-separated feature counts")
    b.add_argument("--trials", type=int)
    b.add_argument("--out", help="directory for summary.csv and trials.csv")
    b.add_argument("--seed", type=int)
    b.add_argument("--timing", action="store_true", help="also print times relative to KERNEL")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("generate", help="write a synthetic training field as CSV")
    g.add_argument("--config")
    g.add_argument("--out", required=True)
    g.add_argument("--test-out")
    g.add_argument("--seed", type=int)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("train", help="train one method once and print its accuracy")
    t.add_argument("--config")
    t.add_argument("--method", choices=METHODS, required=True)
    t.add_argument("--m", dest="m_single", type=int, default=8)
    t.add_argument("--seed", type=int)
    t.add_argument("--sigma", type=float)
    t.add_argument("--save-model")
    t.set_defaults(func=cmd_train)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except Exception as exc:
        print(f"rfcover: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
