"""Batch command-line front-end: configs in, CSV/JSON/SVG artifacts out."""

from essrate.cli.config import ExperimentConfig, expand_sweep, load_config, parse_config
from essrate.cli.main import create_parser, main, run

__all__ = [
    "ExperimentConfig",
    "create_parser",
    "expand_sweep",
    "load_config",
    "main",
    "parse_config",
    "run",
]
