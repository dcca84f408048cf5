"""Monte Carlo experiments and report assembly.

Every trial draws its randomness from ``trial_seed(base_seed, t)``, so the
records do not depend on scheduling.  Reports are canonical JSON; the
``wall_clock_seconds`` field is the only run-dependent entry.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .. import bounds as B
from .._version import __version__
from ..estimators import EstimatorParams, batch_estimate
from ..geometry import DiskModel, block_rng, sample, uniform_ball, uniform_disk
from ..io import dumps
from ..linalg import operator_norm
from ..measures import DiscreteMeasure, covariance, covariance_about, point_covariance
from ..transport import covariance_lipschitz_witness, wasserstein
from .config import ConfigError, ExperimentConfig

SCHEMA_VERSION = "manifold-lens/report/1"
CERTIFIED = "certified regime"
OUTSIDE = "outside certified regime"
LIPSCHITZ_TOL = 1e-9


def trial_seed(base_seed: int, t: int) -> int:
    """64-bit seed for trial ``t``, a hash of ``(base_seed, t)``."""
    state = np.random.SeedSequence([int(base_seed), int(t)]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def thread_count() -> int:
    raw = os.environ.get("MANIFOLD_LENS_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("MANIFOLD_LENS_THREADS", f"expected an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("MANIFOLD_LENS_THREADS", "must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def run_trials(fn, cfg: ExperimentConfig) -> list:
    """``[fn(t, trial_seed(base, t)) for t in range(trials)]``, possibly threaded."""
    seeds = [(t, trial_seed(cfg.base_seed, t)) for t in range(cfg.trials)]
    workers = min(thread_count(), cfg.trials)
    if workers <= 1:
        return [fn(t, s) for t, s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ts: fn(*ts), seeds))


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    records: list
    frequency: float | None
    bounds: dict
    regime: str
    assertions: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    wall_clock_seconds: float = 0.0

    def __post_init__(self):
        if self.frequency is not None and not 0.0 <= self.frequency <= 1.0:
            raise ValueError("frequency must lie in [0, 1]")

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "artifact_version": __version__,
            "formula_version": B.FORMULA_VERSION,
            "kind": self.kind,
            "config": self.config,
            "trials": len(self.records),
            "records": self.records,
            "frequency": self.frequency,
            "bounds": self.bounds,
            "regime": self.regime,
            "assertions": self.assertions,
            "passed": self.passed,
            "summary": self.summary,
        }
        if include_timing:
            out["wall_clock_seconds"] = self.wall_clock_seconds
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return dumps(self.to_dict(include_timing))


def _assertion(name: str, passed: bool, **detail) -> dict:
    return {"name": name, "passed": bool(passed), **detail}


def _expectation(cfg, frequency, name):
    expect = cfg.experiment.get("expect_frequency")
    if expect is None:
        return []
    return [_assertion(name, frequency >= float(expect), expected=float(expect), observed=frequency)]


# bounds -----------------------------------------------------------------------

def bound_inputs(cfg: ExperimentConfig, mode: str) -> B.BoundInputs:
    """Theorem inputs from the model, density, noise and estimator settings.

    Entries of the optional ``bounds`` object override derived values.
    """
    derived = {}
    if cfg.model is not None:
        stats = cfg.model.density_stats(cfg.density)
        derived.update(tau=cfg.model.reach, d=cfg.model.d, D=cfg.model.D, s=cfg.noise.radius, **stats)
    derived.update(r=cfg.estimator.get("r"), m=cfg.m, rho=cfg.estimator.get("rho", 1.0),
                   delta=cfg.experiment.get("delta", 0.05))
    if mode == "tangent":
        derived["theta"] = cfg.experiment.get("theta", 0.1)
    elif mode == "dimension":
        derived["eta"] = cfg.estimator.get("eta") or 0.05
    else:
        derived["eps"] = cfg.experiment.get("eps", 0.5)
        derived["u0"] = cfg.experiment.get("u0")
    derived.update(cfg.raw.get("bounds") or {})
    missing = [k for k in ("tau", "d", "D", "phi_min", "phi_max") if derived.get(k) is None]
    if missing:
        raise ConfigError(f"bounds.{missing[0]}", "is required when no model is given")
    keep = {k: derived.get(k) for k in B.BoundInputs.__dataclass_fields__ if derived.get(k) is not None}
    for k in ("theta", "eta", "eps"):
        if k != {"tangent": "theta", "dimension": "eta", "projector": "eps"}[mode]:
            keep.pop(k, None)
    try:
        return B.BoundInputs(**keep)
    except B.BoundError as exc:
        raise ConfigError("bounds", str(exc)) from None
    except TypeError as exc:
        raise ConfigError("bounds", str(exc)) from None


def bound_flags(cfg: ExperimentConfig, mode: str) -> tuple[dict, str]:
    """Theorem condition flags and the regime label; never raises on formula limits."""
    if cfg.model is not None and isinstance(cfg.model, DiskModel):
        return {"applicable": False, "notes": ["flat disk model is excluded from bound experiments"]}, OUTSIDE
    inp = bound_inputs(cfg, mode)
    try:
        report = B.theorem_conditions(inp).as_dict()
    except B.BoundError as exc:
        return {"applicable": False, "mode": mode, "notes": [str(exc)]}, OUTSIDE
    report["applicable"] = True
    certified = bool(report.get("radius_ok")) and bool(report.get("sample_ok"))
    return report, CERTIFIED if certified else OUTSIDE


def _finish(cfg, kind, records, frequency, bounds, regime, assertions, summary, start):
    return ExperimentReport(kind, cfg.echo(), records, frequency, bounds, regime, assertions, summary,
                            time.perf_counter() - start)


# estimator experiments --------------------------------------------------------------

def _estimator_trial(cfg, params):
    def one(t, seed):
        cloud = sample(cfg.model, cfg.density, cfg.noise, cfg.m, seed)
        res = batch_estimate(cloud, params)
        return t, seed, res
    return one


def run_tangent_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Frequency of ``max angle <= theta`` over independent clouds."""
    start = time.perf_counter()
    theta = float(cfg.experiment.get("theta", 0.1))
    k = cfg.estimator.get("k") or cfg.model.d
    params = EstimatorParams(r=cfg.estimator["r"], k=k, rho=cfg.estimator["rho"])
    records = []
    for t, seed, res in run_trials(_estimator_trial(cfg, params), cfg):
        records.append({"trial": t, "seed": seed, "max_angle": res.max_angle,
                        "success": res.max_angle is not None and res.max_angle <= theta,
                        **res.summary})
    freq = sum(r["success"] for r in records) / len(records)
    bounds, regime = bound_flags(cfg, "tangent")
    angles = [r["max_angle"] for r in records]
    summary = {"theta": theta, "worst_max_angle": max(angles), "median_max_angle": float(np.median(angles))}
    return _finish(cfg, "tangent", records, freq, bounds, regime,
                   _expectation(cfg, freq, "tangent success frequency"), summary, start)


def run_dimension_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Frequency of trials in which every processed ``d_hat`` equals d."""
    start = time.perf_counter()
    params = EstimatorParams(r=cfg.estimator["r"], eta=cfg.estimator["eta"], rho=cfg.estimator["rho"])
    d = cfg.model.d
    records = []
    for t, seed, res in run_trials(_estimator_trial(cfg, params), cfg):
        dims = [e.d_hat for e in res.estimates if e.d_hat is not None]
        counts = {str(v): dims.count(v) for v in sorted(set(dims))}
        records.append({"trial": t, "seed": seed, "all_correct": bool(res.all_dims_correct),
                        "wrong": sum(v != d for v in dims), "d_hat_counts": counts, **res.summary})
    freq = sum(r["all_correct"] for r in records) / len(records)
    bounds, regime = bound_flags(cfg, "dimension")
    summary = {"d": d, "eta": cfg.estimator["eta"], "total_wrong": sum(r["wrong"] for r in records)}
    return _finish(cfg, "dimension", records, freq, bounds, regime,
                   _expectation(cfg, freq, "dimension all-correct frequency"), summary, start)


# concentration -------------------------------------------------------------------

def _generator(cfg: ExperimentConfig):
    """``(draw(n, rng), Sigma, mean, support_radius, D)`` for the configured generator."""
    spec = cfg.raw.get("generator") or {"kind": "ball", "D": 2, "radius": 1.0}
    kind = spec.get("kind", "ball")
    if kind == "ball":
        D = int(spec.get("D", 2))
        radius = float(spec.get("radius", 1.0))
        if D < 1 or not radius > 0:
            raise ConfigError("generator", "need D >= 1 and radius > 0")
        sigma = radius**2 / (D + 2) * np.eye(D)
        return (lambda n, rng: uniform_ball(n, D, rng, radius)), sigma, np.zeros(D), radius, D
    if kind == "discrete":
        try:
            mu = DiscreteMeasure(spec["atoms"], spec.get("weights", [1.0] * len(spec["atoms"])))
        except (KeyError, ValueError) as exc:
            raise ConfigError("generator.atoms", str(exc)) from None
        mean = mu.mean()
        radius = float(spec.get("radius", np.max(np.linalg.norm(mu.atoms - mean, axis=1))))
        if not radius > 0:
            raise ConfigError("generator.radius", "must be positive")

        def draw(n, rng):
            return mu.atoms[rng.choice(mu.size, size=n, p=mu.weights)]
        return draw, covariance(mu), mean, radius, mu.ambient_dim
    raise ConfigError("generator.kind", f"unknown generator {kind!r}")


def run_concentration_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Empirical tail of ``||Sigma_hat - Sigma||`` against the concentration bounds.

    The mean-centered estimate is compared with ``(4D+2) exp(-m eps^2 / 1152 r^4)``
    and the estimate about the true mean with ``2D exp(-m eps^2 / 512 r^4)``.
    """
    start = time.perf_counter()
    draw, sigma, mean, radius, D = _generator(cfg)
    eps_grid = cfg.experiment.get("eps", [0.5])
    eps_grid = [float(e) for e in (eps_grid if isinstance(eps_grid, list) else [eps_grid])]
    if any(e < 0 for e in eps_grid):
        raise ConfigError("experiment.eps", "must be non-negative")
    m = cfg.m

    def one(t, seed):
        x = draw(m, block_rng(seed, 0))
        err = operator_norm(point_covariance(x) - sigma)
        err0 = operator_norm(covariance_about(DiscreteMeasure.empirical(x), mean) - sigma)
        return {"trial": t, "seed": seed, "error": err, "error_fixed_center": err0}

    records = run_trials(one, cfg)
    T = len(records)
    errs = np.array([r["error"] for r in records])
    errs0 = np.array([r["error_fixed_center"] for r in records])
    table, assertions = [], []
    for eps in eps_grid:
        b0, b = B.cov_concentration_bounds(eps, m, radius, D)
        for label, e, bound in (("mean_centered", errs, b), ("fixed_center", errs0, b0)):
            f = float(np.mean(e >= eps))
            se = math.sqrt(f * (1 - f) / T)
            row = {"eps": eps, "estimator": label, "frequency": f, "stderr": se, "bound": bound,
                   "vacuous": B.is_vacuous(bound)}
            table.append(row)
            if bound <= 1:
                assertions.append(_assertion(f"dominance {label} eps={eps}", f <= bound + 3 * se,
                                             frequency=f, bound=bound, stderr=se))
    headline = next(r for r in table if r["eps"] == eps_grid[0] and r["estimator"] == "mean_centered")
    bounds = {"radius": radius, "m": m, "D": D, "table": table}
    summary = {"max_error": float(errs.max()), "mean_error": float(errs.mean()),
               "non_vacuous_checks": len(assertions)}
    return _finish(cfg, "concentration", records, headline["frequency"], bounds,
                   OUTSIDE if headline["vacuous"] else CERTIFIED, assertions, summary, start)


# covariance Lipschitz sweep -----------------------------------------------------

def _random_pair(rng, r, D, max_atoms):
    n1, n2 = (int(v) for v in rng.integers(1, max_atoms + 1, size=2))
    c1 = rng.standard_normal(D) * r
    atoms1 = c1 + uniform_ball(n1, D, rng, r)
    style = int(rng.integers(3))
    if style == 0:
        # independent measure in another ball
        c2 = rng.standard_normal(D) * r
        atoms2 = c2 + uniform_ball(n2, D, rng, r)
    elif style == 1:
        # same ball, fresh atoms
        atoms2 = c1 + uniform_ball(n2, D, rng, r)
    else:
        # small perturbation of the first measure, kept inside the ball
        n2 = n1
        moved = atoms1 - c1 + 0.05 * r * rng.standard_normal((n1, D))
        norm = np.linalg.norm(moved, axis=1, keepdims=True)
        atoms2 = c1 + np.where(norm < r, moved, moved / norm * r * 0.999)
    w1 = rng.random(n1) + 0.05
    w2 = rng.random(n2) + 0.05
    return DiscreteMeasure(atoms1, w1), DiscreteMeasure(atoms2, w2)


def run_lipschitz_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Sweep of ``||Sigma[mu] - Sigma[nu]|| <= 8 r W_p(mu, nu)`` over random pairs."""
    start = time.perf_counter()
    exp = cfg.experiment
    r_grid = [float(v) for v in exp.get("r_grid", [0.1, 0.5, 1.0, 2.0])]
    if not r_grid or any(not v > 0 for v in r_grid):
        raise ConfigError("experiment.r_grid", "needs positive radii")
    max_atoms = int(exp.get("max_atoms", 6))
    max_dim = int(exp.get("max_dim", 4))
    if max_atoms < 1 or max_dim < 1:
        raise ConfigError("experiment.max_atoms", "max_atoms and max_dim must be >= 1")
    p = float(exp.get("p", 1.0))
    if not p >= 1:
        raise ConfigError("experiment.p", "must be >= 1")

    def one(t, seed):
        rng = block_rng(seed, 0)
        r = r_grid[t % len(r_grid)]
        D = int(rng.integers(1, max_dim + 1))
        mu, nu = _random_pair(rng, r, D, max_atoms)
        lhs, rhs = covariance_lipschitz_witness(mu, nu, r, p)
        rec = {"trial": t, "seed": seed, "r": r, "D": D, "n_mu": mu.size, "n_nu": nu.size,
               "lhs": lhs, "rhs": rhs, "violation": lhs > rhs + LIPSCHITZ_TOL}
        rec["ratio"] = lhs / rhs if rhs > 0 else None
        return rec

    records = run_trials(one, cfg)
    violations = sum(r["violation"] for r in records)
    ratios = [r["ratio"] for r in records if r["ratio"] is not None]
    summary = {"violations": violations, "skipped": len(records) - len(ratios),
               "max_ratio": max(ratios) if ratios else None}
    return _finish(cfg, "lipschitz", records, 1 - violations / len(records),
                   {"constant": 8.0, "p": p, "r_grid": r_grid}, "deterministic inequality",
                   [_assertion("zero violations", violations == 0, violations=violations)], summary, start)


# flattening ----------------------------------------------------------------------

def _local_sample(cfg, x, r, n_loc, seed):
    """``n_loc`` draws of the sampling law conditioned on ``B_r(x)``, by rejection."""
    kept, total, batch = [], 0, 0
    chunk = max(4 * n_loc, 2048)
    while total < n_loc:
        if batch >= 10_000:
            raise ConfigError("estimator.r", "ball mass too small for rejection sampling")
        pts = sample(cfg.model, cfg.density, cfg.noise, chunk, seed_mix(seed, 1, batch)).points
        inside = pts[np.linalg.norm(pts - x, axis=1) < r]
        kept.append(inside[: n_loc - total])
        total += kept[-1].shape[0]
        batch += 1
    return np.concatenate(kept)


def seed_mix(*parts: int) -> int:
    state = np.random.SeedSequence([int(p) for p in parts]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def _flattening_center(cfg, seed, r):
    model = cfg.model
    for attempt in range(1000):
        cloud = sample(model, cfg.density, cfg.noise, 1, seed_mix(seed, 0, attempt))
        x, foot = cloud.points[0], cloud.foot[0]
        if not isinstance(model, DiskModel) or np.linalg.norm(foot) <= model.R - r - cfg.noise.radius:
            return x, foot, cloud.tangents[0]
    raise ConfigError("estimator.r", "no admissible center found")


def run_flattening_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """``W_1`` between local samples and a tangent-disk discretization.

    The allowance ``eps_mc`` is the ``W_1`` distance between two independent
    discretizations of the tangent disk measure.
    """
    start = time.perf_counter()
    r = cfg.estimator["r"]
    s = cfg.noise.radius
    tau = cfg.model.reach
    if not 2 * s <= r <= (math.sqrt(2) - 1) * tau - 2 * s:
        raise ConfigError("estimator.r", "regime violated: need 2s <= r <= (sqrt(2) - 1) tau - 2s")
    n_loc = int(cfg.experiment.get("n_loc", 500))
    if n_loc < 1:
        raise ConfigError("experiment.n_loc", "must be >= 1")
    stats = cfg.model.density_stats(cfg.density)
    alpha_tau = 0.0 if stats["alpha"] == 0 else stats["alpha"] * tau
    q = 3.0 + (8 * cfg.model.d * stats["phi_max"] + 5 * alpha_tau) / stats["phi_min"]
    bound = 0.0 if math.isinf(tau) else q * r**2 / tau

    def one(t, seed):
        x, foot, basis = _flattening_center(cfg, seed, r)
        local = _local_sample(cfg, x, r, n_loc, seed)
        rng = block_rng(seed, 2)
        disk_a = uniform_disk(n_loc, basis, rng, r, foot)
        disk_b = uniform_disk(n_loc, basis, rng, r, foot)
        w = wasserstein(DiscreteMeasure.empirical(local), DiscreteMeasure.empirical(disk_a), 1)[0]
        eps_mc = wasserstein(DiscreteMeasure.empirical(disk_a), DiscreteMeasure.empirical(disk_b), 1)[0]
        return {"trial": t, "seed": seed, "center": x.tolist(), "w1": w, "eps_mc": eps_mc,
                "bound": bound, "success": w <= bound + eps_mc}

    records = run_trials(one, cfg)
    freq = sum(r_["success"] for r_ in records) / len(records)
    expect = cfg.experiment.get("expect_frequency", 1.0)
    assertions = [_assertion("flattening bound holds", freq >= float(expect), expected=float(expect),
                             observed=freq)]
    summary = {"max_w1": max(r_["w1"] for r_ in records), "max_eps_mc": max(r_["eps_mc"] for r_ in records)}
    return _finish(cfg, "flattening", records, freq, {"q": q, "tau": tau, "r": r, "bound": bound},
                   "surrogate bound", assertions, summary, start)


# bounds report -------------------------------------------------------------------

def run_bounds_report(cfg: ExperimentConfig) -> ExperimentReport:
    """Theorem condition flags for every mode whose parameter is available."""
    start = time.perf_counter()
    modes = cfg.experiment.get("modes") or ["tangent", "dimension"]
    out = {}
    for mode in modes:
        if mode not in ("tangent", "dimension", "projector"):
            raise ConfigError("experiment.modes", f"unknown mode {mode!r}")
        if mode == "projector" and cfg.model is not None and cfg.experiment.get("u0") is None \
                and cfg.estimator.get("r") is not None and not isinstance(cfg.model, DiskModel):
            est = B.estimate_u0((cfg.model, cfg.density, cfg.noise), cfg.estimator["r"],
                                seed=trial_seed(cfg.base_seed, 0))
            out["u0_estimate"] = est
            local = replace(cfg, experiment={**cfg.experiment, "u0": est["u0"]})
            out[mode], regime = bound_flags(local, mode)
        else:
            out[mode], regime = bound_flags(cfg, mode)
        out[mode]["regime"] = regime
    regimes = [out[m]["regime"] for m in modes]
    regime = CERTIFIED if all(r == CERTIFIED for r in regimes) else OUTSIDE
    return _finish(cfg, "bounds-report", [{"trial": t, "modes": modes} for t in range(cfg.trials)], None, out, regime, [], {}, start)


RUNNERS = {
    "tangent": run_tangent_experiment,
    "dimension": run_dimension_experiment,
    "concentration": run_concentration_experiment,
    "lipschitz": run_lipschitz_experiment,
    "flattening": run_flattening_experiment,
    "bounds-report": run_bounds_report,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    return RUNNERS[cfg.kind](cfg)
