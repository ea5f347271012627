"""Experiment runner behind the ``fpp`` command."""

from .config import EXPERIMENTS, ConfigError, ExperimentConfig, load, loads
from .records import ExperimentRecord, emit_plot_data, parse_plot_data, read_jsonl, write_jsonl

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentRecord",
    "emit_plot_data",
    "load",
    "loads",
    "parse_plot_data",
    "read_jsonl",
    "write_jsonl",
]
