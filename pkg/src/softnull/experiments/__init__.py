"""Experiment runners and command line interface."""

from .config import ExperimentConfig, load_config
from .runners import (
    run_partition_compare,
    run_rate_curve,
    run_suppression_curve,
    run_users_sweep,
)

__all__ = [
    "ExperimentConfig",
    "load_config",
    "run_partition_compare",
    "run_rate_curve",
    "run_suppression_curve",
    "run_users_sweep",
]
