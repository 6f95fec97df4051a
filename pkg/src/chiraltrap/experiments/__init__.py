"""Declarative experiments: configs, presets, sweeps and disorder ensembles."""

from .config import ConfigError, ExperimentConfig, config_hash
from .presets import UnknownPresetError, get_preset, presets
from .runner import EnsembleTrace, ResultRecord, ensemble_average, run

__all__ = [
    "ConfigError",
    "EnsembleTrace",
    "ExperimentConfig",
    "ResultRecord",
    "UnknownPresetError",
    "config_hash",
    "ensemble_average",
    "get_preset",
    "presets",
    "run",
]
