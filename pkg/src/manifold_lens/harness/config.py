"""Experiment configuration: JSON objects ``model``, ``density``, ``noise``,
``estimator`` and ``experiment`` (plus optional ``generator``, ``bounds``).

Validation errors raise :class:`ConfigError` naming the offending field.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..geometry import (CliffordTorusModel, DensityModel, DiskModel, GeometryError,
                        NoiseModel, SphereModel, Torus3DModel)

KINDS = ("tangent", "dimension", "concentration", "lipschitz", "flattening", "bounds-report")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _num(obj, key, where, default=None, required=False, cast=float):
    if key not in obj or obj[key] is None:
        if required:
            raise ConfigError(f"{where}.{key}", "is required")
        return default
    try:
        value = cast(obj[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key}", f"expected a number, got {obj[key]!r}") from None
    if cast is float and not math.isfinite(value):
        raise ConfigError(f"{where}.{key}", "must be finite")
    return value


def build_model(spec: dict):
    if not isinstance(spec, dict):
        raise ConfigError("model", "expected an object")
    name = spec.get("name")
    try:
        if name == "sphere":
            return SphereModel(_num(spec, "d", "model", 1, cast=int), _num(spec, "D", "model", 2, cast=int),
                               _num(spec, "R", "model", 1.0))
        if name == "clifford_torus":
            return CliffordTorusModel(_num(spec, "r1", "model", 1.0), _num(spec, "r2", "model", 1.0))
        if name == "torus3d":
            return Torus3DModel(_num(spec, "R", "model", 2.0), _num(spec, "r", "model", 0.5))
        if name == "disk":
            return DiskModel(_num(spec, "d", "model", 2, cast=int), _num(spec, "D", "model", 3, cast=int),
                             _num(spec, "R", "model", 1.0))
    except GeometryError as exc:
        raise ConfigError("model", str(exc)) from None
    raise ConfigError("model.name", f"unknown model {name!r}")


def build_density(spec: dict | None, model=None):
    spec = spec or {}
    try:
        density = DensityModel(spec.get("kind", "uniform"), _num(spec, "a", "density", 0.5))
    except GeometryError as exc:
        raise ConfigError("density", str(exc)) from None
    if model is not None and density.kind != "uniform" and not model.supports_sinusoidal:
        raise ConfigError("density.kind", f"{model.name} only supports the uniform density")
    return density


def build_noise(spec: dict | None, model=None):
    spec = spec or {}
    try:
        noise = NoiseModel(spec.get("kind", "none"), _num(spec, "s", "noise", 0.0))
    except GeometryError as exc:
        raise ConfigError("noise", str(exc)) from None
    if model is not None and noise.radius >= model.reach:
        raise ConfigError("noise.s", "noise exceeds reach")
    return noise


@dataclass
class ExperimentConfig:
    kind: str
    raw: dict
    trials: int = 1
    base_seed: int = 0
    m: int | None = None
    output: str | None = None
    model: object = None
    density: DensityModel | None = None
    noise: NoiseModel | None = None
    estimator: dict = field(default_factory=dict)
    experiment: dict = field(default_factory=dict)

    def echo(self) -> dict:
        out = copy.deepcopy(self.raw)
        out.setdefault("experiment", {})
        out["experiment"].update({"kind": self.kind, "trials": self.trials, "base_seed": self.base_seed})
        if self.m is not None:
            out["experiment"]["m"] = self.m
        out.pop("output", None)
        return out


def parse_config(raw: dict, seed: int | None = None, trials: int | None = None,
                 out: str | None = None) -> ExperimentConfig:
    """Validate a config dict, applying command-line overrides."""
    if not isinstance(raw, dict):
        raise ConfigError("config", "expected a JSON object")
    raw = copy.deepcopy(raw)
    exp = raw.get("experiment") or {}
    if not isinstance(exp, dict):
        raise ConfigError("experiment", "expected an object")
    kind = exp.get("kind", "bounds-report")
    if kind not in KINDS:
        raise ConfigError("experiment.kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    n_trials = trials if trials is not None else _num(exp, "trials", "experiment", 1, cast=int)
    if n_trials < 1:
        raise ConfigError("experiment.trials", "must be >= 1")
    base_seed = seed if seed is not None else _num(exp, "base_seed", "experiment", 0, cast=int)
    if not 0 <= base_seed < 2**64:
        raise ConfigError("experiment.base_seed", "must be an unsigned 64-bit integer")
    m = _num(exp, "m", "experiment", None, cast=int)
    if m is not None and m < 1:
        raise ConfigError("experiment.m", "must be >= 1")
    cfg = ExperimentConfig(kind, raw, n_trials, base_seed, m, out or raw.get("output"))
    if "model" in raw:
        cfg.model = build_model(raw["model"])
        cfg.density = build_density(raw.get("density"), cfg.model)
        cfg.noise = build_noise(raw.get("noise"), cfg.model)
        if cfg.model.name == "torus3d" and cfg.density.kind != "uniform":
            raise ConfigError("density.kind", "torus3d requires the uniform density")
    est = raw.get("estimator") or {}
    if not isinstance(est, dict):
        raise ConfigError("estimator", "expected an object")
    r = _num(est, "r", "estimator", None)
    if r is not None and not r > 0:
        raise ConfigError("estimator.r", "must be positive")
    eta = _num(est, "eta", "estimator", None)
    if eta is not None and not 0 < eta < 1:
        raise ConfigError("estimator.eta", "must lie in (0, 1)")
    rho = _num(est, "rho", "estimator", 1.0)
    if not 0 < rho <= 1:
        raise ConfigError("estimator.rho", "must lie in (0, 1]")
    cfg.estimator = {"r": r, "eta": eta, "rho": rho, "k": _num(est, "k", "estimator", None, cast=int)}
    cfg.experiment = exp
    theta = _num(exp, "theta", "experiment", None)
    if theta is not None and not 0 < theta <= math.pi / 2:
        raise ConfigError("experiment.theta", "must lie in (0, pi/2]")
    delta = _num(exp, "delta", "experiment", None)
    if delta is not None and not 0 < delta < 1:
        raise ConfigError("experiment.delta", "must lie in (0, 1)")
    _require_for_kind(cfg)
    return cfg


def _require_for_kind(cfg: ExperimentConfig):
    if cfg.kind in ("tangent", "dimension", "flattening") and cfg.model is None:
        raise ConfigError("model", f"required for {cfg.kind} experiments")
    if cfg.kind in ("tangent", "dimension"):
        if cfg.estimator["r"] is None:
            raise ConfigError("estimator.r", "is required")
        if cfg.m is None:
            raise ConfigError("experiment.m", "is required")
    if cfg.kind == "dimension" and cfg.estimator["eta"] is None:
        cfg.estimator["eta"] = 0.05
    if cfg.kind == "flattening":
        if cfg.estimator["r"] is None:
            raise ConfigError("estimator.r", "is required")
        if not cfg.model.has_geodesic:
            raise ConfigError("model.name", "flattening needs a model with geodesic distances")
    if cfg.kind == "concentration":
        if cfg.m is None:
            raise ConfigError("experiment.m", "is required")


def load_config(path, **overrides) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError("config", f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from None
    return parse_config(raw, **overrides)
