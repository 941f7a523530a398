"""Experiment harness: configs, seeded trial pool, persistence and plot export."""

from .export import SERIES_COLUMNS, emit_plot_data
from .schemas import ExperimentConfig, ExperimentKind, ResultRecord, validate_config

__all__ = [
    "SERIES_COLUMNS",
    "emit_plot_data",
    "ExperimentConfig",
    "ExperimentKind",
    "ResultRecord",
    "validate_config",
]
