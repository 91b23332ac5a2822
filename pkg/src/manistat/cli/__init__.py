from manistat.cli.config import (
    Cell,
    ExperimentConfig,
    ExperimentKind,
    load_config_file,
    parse_block_policy,
)
from manistat.cli.experiment import run_cell, run_experiment, run_replicate
from manistat.cli.ingest import ingest, sqrt_compose, write_series
from manistat.cli.runners import run_first_order, run_second_order
from manistat.cli.schemas import SCHEMA_VERSION, CellResult, ReportFile

__all__ = [
    "Cell",
    "CellResult",
    "ExperimentConfig",
    "ExperimentKind",
    "ReportFile",
    "SCHEMA_VERSION",
    "ingest",
    "load_config_file",
    "parse_block_policy",
    "run_cell",
    "run_experiment",
    "run_first_order",
    "run_replicate",
    "run_second_order",
    "sqrt_compose",
    "write_series",
]
