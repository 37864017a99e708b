"""Sweep orchestration, result persistence, tables, and charts."""

from .sweep import (
    ConfigError,
    ExplainConfig,
    SweepConfig,
    CellResult,
    CellFailure,
    ResultSet,
    DEFAULT_RATES,
    derive_seed,
    run_cell,
    sweep,
    load_results,
    build_dataset,
)
from .report import render_report, CONTRAST_RATE
from .charts import render_charts

__all__ = [
    "ConfigError",
    "ExplainConfig",
    "SweepConfig",
    "CellResult",
    "CellFailure",
    "ResultSet",
    "DEFAULT_RATES",
    "derive_seed",
    "run_cell",
    "sweep",
    "load_results",
    "build_dataset",
    "render_report",
    "render_charts",
    "CONTRAST_RATE",
]
