"""Batch experiments: configuration, scenario runners, scaling fits, CLI."""
from .config import ExperimentConfig, load_config, parse_config, validate
from .experiments import RunResult, compare_deflections, run_experiment
from .fitting import ScalingFitResult, fit_scaling

__all__ = [
    "ExperimentConfig",
    "RunResult",
    "ScalingFitResult",
    "compare_deflections",
    "fit_scaling",
    "load_config",
    "parse_config",
    "run_experiment",
    "validate",
]
