"""Records written by the command-line front end.

`ReportFile` is the JSON document every subcommand writes; `CellResult` is one
row of the experiment CSV.
"""

import datetime
import platform
from importlib import metadata
from typing import Any, Optional, Union

import numpy as np
import scipy
from pydantic import BaseModel, Field

from manistat.cli.config import ExperimentKind
from manistat.first_order import FirstOrderReport
from manistat.second_order import SecondOrderReport
from manistat.simulate import SimModel

SCHEMA_VERSION = "1.0"

CELL_COLUMNS = [
    "experiment",
    "manifold",
    "model",
    "method",
    "T",
    "tau",
    "n_policy",
    "replicates",
    "reject_rate",
    "stderr",
    "failures",
    "seed",
    "elapsed",
]


def versions() -> dict[str, str]:
    try:
        manistat_version = metadata.version("manistat")
    except metadata.PackageNotFoundError:
        manistat_version = "unknown"
    return {
        "manistat": manistat_version,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


class CellResult(BaseModel):
    experiment: ExperimentKind
    manifold: str
    model: SimModel
    method: str
    T: int
    tau: float
    n_policy: str
    replicates: int
    reject_rate: float
    # binomial standard error sqrt(p (1 - p) / replicates)
    stderr: float
    # replicates whose simulation or test raised; excluded from the rate
    failures: int = 0
    seed: int
    elapsed: float


class ReportFile(BaseModel):
    schema_version: str = SCHEMA_VERSION
    command: str
    inputs: dict[str, Any]
    seed: Optional[int] = None
    report: Optional[Union[FirstOrderReport, SecondOrderReport]] = None
    cells: list[CellResult] = Field(default_factory=list)
    versions: dict[str, str] = Field(default_factory=versions)
    created: datetime.datetime = Field(
        default_factory=lambda: datetime.datetime.now(datetime.timezone.utc)
    )
    elapsed: float = 0.0

    def numeric_content(self) -> dict[str, Any]:
        """The fields that must match exactly when a run is repeated."""
        return self.model_dump(
            mode="json", exclude={"versions", "created", "elapsed", "cells"}
        ) | {
            "cells": [
                cell.model_dump(mode="json", exclude={"elapsed"})
                for cell in self.cells
            ]
        }
