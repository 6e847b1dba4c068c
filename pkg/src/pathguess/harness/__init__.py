"""Configuration, experiment orchestration and the command line."""
from .config import ExperimentConfig, load_config, model_family, model_from_spec, parse_config
from .experiment import CSV_COLUMNS, ExperimentResult, grid_seed, run_experiment

__all__ = [
    "CSV_COLUMNS",
    "ExperimentConfig",
    "ExperimentResult",
    "grid_seed",
    "load_config",
    "model_family",
    "model_from_spec",
    "parse_config",
    "run_experiment",
]
