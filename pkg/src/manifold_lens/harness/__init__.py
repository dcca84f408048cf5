"""Configuration, Monte Carlo experiments and the command-line interface."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import (ExperimentReport, run_bounds_report, run_concentration_experiment,
                          run_dimension_experiment, run_experiment, run_flattening_experiment,
                          run_lipschitz_experiment, run_tangent_experiment, trial_seed)

__all__ = [
    "ConfigError", "ExperimentConfig", "ExperimentReport", "load_config", "parse_config",
    "run_bounds_report", "run_concentration_experiment", "run_dimension_experiment", "run_experiment",
    "run_flattening_experiment", "run_lipschitz_experiment", "run_tangent_experiment", "trial_seed",
]
