"""Command-line entry point.

Exit codes: 0 on success, 2 on configuration or input errors, 3 when an
experiment assertion fails.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from ..bounds import BoundError
from ..estimators import EstimatorError, EstimatorParams, batch_estimate
from ..geometry import GeometryError, sample
from ..io import dumps, read_cloud, read_measure, write_cloud, write_point_table
from ..measures import MeasureError
from ..transport import TransportError, wasserstein
from .config import ConfigError, load_config
from .experiments import run_bounds_report, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_ASSERTION = 0, 2, 3
INPUT_ERRORS = (ConfigError, BoundError, EstimatorError, GeometryError, MeasureError, TransportError)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="manifold-lens", description="Local PCA manifold estimation toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True, trials=False):
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", help="output path")
        if seed:
            p.add_argument("--seed", type=int, help="override experiment.base_seed")
        if trials:
            p.add_argument("--trials", type=int, help="override experiment.trials")

    common(sub.add_parser("sample", help="draw a point cloud and write it as CSV"))
    p = sub.add_parser("estimate", help="run the local estimators on a cloud")
    common(p)
    p.add_argument("--cloud", help="read the cloud from this CSV instead of sampling")
    common(sub.add_parser("bounds", help="evaluate the theorem conditions"), seed=False)
    common(sub.add_parser("experiment", help="run a Monte Carlo experiment"), trials=True)
    p = sub.add_parser("wasserstein", help="exact W_p between two CSV measures")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--out", help="output path")
    return parser


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_sample(args) -> int:
    cfg = load_config(args.config, seed=args.seed)
    if cfg.model is None:
        raise ConfigError("model", "required for sampling")
    if cfg.m is None:
        raise ConfigError("experiment.m", "is required")
    if not args.out:
        raise ConfigError("--out", "sample needs an output CSV path")
    cloud = sample(cfg.model, cfg.density, cfg.noise, cfg.m, cfg.base_seed)
    csv_path, sidecar = write_cloud(cloud, args.out)
    sys.stdout.write(dumps({"cloud": str(csv_path), "metadata": str(sidecar), "m": cloud.m, "D": cloud.D}))
    return EXIT_OK


def _cmd_estimate(args) -> int:
    cfg = load_config(args.config, seed=args.seed)
    if args.cloud:
        cloud = read_cloud(args.cloud)
    else:
        if cfg.model is None or cfg.m is None:
            raise ConfigError("model", "model and experiment.m are required without --cloud")
        cloud = sample(cfg.model, cfg.density, cfg.noise, cfg.m, cfg.base_seed)
    est = cfg.estimator
    if est["r"] is None:
        raise ConfigError("estimator.r", "is required")
    has_truth = bool(cloud.metadata.get("has_ground_truth", True))
    k = est["k"] or (cloud.d if has_truth else None)
    params = EstimatorParams(r=est["r"], k=k, eta=est["eta"] or 0.05, rho=est["rho"])
    res = batch_estimate(cloud, params)
    if args.out:
        write_point_table(res.estimates, cloud.D, args.out)
    sys.stdout.write(dumps({"max_angle": res.max_angle, "all_dims_correct": res.all_dims_correct,
                            **res.summary}))
    return EXIT_OK


def _cmd_bounds(args) -> int:
    cfg = load_config(args.config)
    cfg = replace(cfg, kind="bounds-report", trials=1)
    _emit(run_bounds_report(cfg).to_json(include_timing=False), args.out)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config, seed=args.seed, trials=args.trials, out=args.out)
    report = run_experiment(cfg)
    _emit(report.to_json(), cfg.output)
    for a in report.assertions:
        if not a["passed"]:
            print(f"assertion failed: {a['name']}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_ASSERTION


def _cmd_wasserstein(args) -> int:
    try:
        mu, nu = read_measure(args.first), read_measure(args.second)
    except (OSError, ValueError, IndexError) as exc:
        raise ConfigError("measure", str(exc)) from None
    dist, plan = wasserstein(mu, nu, args.p)
    moves = [{"source": int(i), "target": int(j), "mass": float(w)}
             for i, j, w in zip(plan.rows, plan.cols, plan.mass)]
    _emit(dumps({"distance": dist, "p": args.p, "plan": moves}), args.out)
    return EXIT_OK


COMMANDS = {"sample": _cmd_sample, "estimate": _cmd_estimate, "bounds": _cmd_bounds,
            "experiment": _cmd_experiment, "wasserstein": _cmd_wasserstein}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


cli_main = main

if __name__ == "__main__":
    sys.exit(main())
