"""Experiment harness: synthetic signals, CSV data, seeded trial protocol,
reports and the ``scncel`` command line."""

from .config import ConfigError, DataError, ExperimentConfig, config_from_dict, load_config
from .experiment import Comparison, TrialReport, compare_samplers, run_experiment
from .metrics import metrics
from .synthetic import PRESETS, PRESET_ORDER, SyntheticClassSpec, generate_synthetic_recording

__all__ = [
    "ConfigError", "DataError", "ExperimentConfig", "config_from_dict", "load_config",
    "Comparison", "TrialReport", "compare_samplers", "run_experiment", "metrics",
    "PRESETS", "PRESET_ORDER", "SyntheticClassSpec", "generate_synthetic_recording",
]
