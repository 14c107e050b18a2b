"""Experiment orchestration: configs, runner, reporting, and the CLI."""

from .config import (
    CONFIG_SCHEMA,
    ConfigError,
    ExperimentConfig,
    list_presets,
    load_config,
    preset_path,
    resolve_config,
    validate_config,
)
from .runner import CheckResult, ReportError, RunOutcome, report, run

__all__ = [
    "CONFIG_SCHEMA",
    "CheckResult",
    "ConfigError",
    "ExperimentConfig",
    "ReportError",
    "RunOutcome",
    "list_presets",
    "load_config",
    "preset_path",
    "report",
    "resolve_config",
    "run",
    "validate_config",
]
