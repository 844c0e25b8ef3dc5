"""Statistical gates, experiment configuration and drivers, and the CLI."""

from .config import EXPERIMENTS, ExperimentConfig, default_config, load_config
from .experiments import ExperimentResult, run_experiment
from .stats import KsReport, ecdf, ks_distance, ks_two_sample, rv_index_estimate

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentResult",
    "KsReport",
    "default_config",
    "ecdf",
    "ks_distance",
    "ks_two_sample",
    "load_config",
    "run_experiment",
    "rv_index_estimate",
]
