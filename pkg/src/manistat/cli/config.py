"""This module contains the configuration of the Monte Carlo experiments.

An experiment is a grid of cells (model, method, T, tau). Each cell simulates
`replicates` independent series, runs one test per series and reports the
rejection rate. Values come from keyword arguments, `MANISTAT_*` environment
variables, a `.env` file, or a flat key=value file read by
`load_config_file`; command-line flags win over all of them.

Typical usage example:

  cfg = ExperimentConfig(experiment="Table1", replicates=200)
  cells = cfg.cells()
"""

import pathlib
from enum import Enum
from typing import Optional

from dotenv import dotenv_values
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from manistat.exceptions import InvalidInputError
from manistat.first_order import BootstrapMethod
from manistat.simulate import SimModel, SimSpec
from manistat.utils import get_logger

logger = get_logger(__name__)

SECOND_ORDER = "second_order"


class ExperimentKind(str, Enum):
    Table1 = "Table1"
    Table2 = "Table2"
    PowerFirst = "PowerFirst"
    PowerSecond = "PowerSecond"


_DEFAULT_MODELS = {
    ExperimentKind.Table1: [SimModel.M1, SimModel.M2],
    ExperimentKind.Table2: [
        SimModel.M3_sphere,
        SimModel.M3_spd,
        SimModel.EuclideanAR,
    ],
    ExperimentKind.PowerFirst: [SimModel.M1, SimModel.M2],
    ExperimentKind.PowerSecond: [SimModel.M3_sphere, SimModel.M3_spd],
}
_DEFAULT_T = {
    ExperimentKind.Table1: [50, 100, 500],
    ExperimentKind.Table2: [256, 512, 1024],
    ExperimentKind.PowerFirst: [100],
    ExperimentKind.PowerSecond: [1024],
}
_DEFAULT_TAUS = {
    ExperimentKind.Table1: [0.0],
    ExperimentKind.Table2: [0.0],
    ExperimentKind.PowerFirst: [0.0, 0.25, 0.5, 0.75, 1.0],
    ExperimentKind.PowerSecond: [0.0, 0.25, 0.5, 1.0, 1.5],
}
_DEFAULT_METHODS = {
    ExperimentKind.Table1: [
        BootstrapMethod.camb,
        BootstrapMethod.b1,
        BootstrapMethod.b2,
    ],
    ExperimentKind.PowerFirst: [BootstrapMethod.camb],
}


def parse_block_policy(policy: str, T: int, even: bool = False) -> Optional[int]:
    """Resolves a block policy to a block size for a series of length T.

    `auto` returns None (the test picks its default), `T/<k>` gives
    floor(T/k) and anything else must be a positive integer. With `even`
    the result is rounded down to an even number.
    """
    policy = str(policy).strip()
    if policy == "auto":
        return None
    try:
        if policy.startswith("T/"):
            n = T // int(policy[2:])
        else:
            n = int(policy)
    except (ValueError, ZeroDivisionError):
        raise InvalidInputError(
            f"block policy must be 'auto', 'T/<k>' or an integer, got {policy!r}"
        ) from None
    if even:
        n -= n % 2
    if n < 1 or (even and n < 2):
        raise InvalidInputError(f"block policy {policy!r} gives n={n} for T={T}")
    return n


class Cell(BaseModel):
    """One point of the experiment grid."""

    experiment: ExperimentKind
    model: SimModel
    # a bootstrap method, or "second_order"
    method: str
    T: int
    tau: float
    n_policy: str
    replicates: int
    seed: int

    @property
    def manifold(self) -> str:
        return SimSpec(model=self.model, T=1).descriptor.label()

    @property
    def data_key(self) -> str:
        """Identifies the simulated data; methods on one key share series."""
        return f"{self.experiment.value}/{self.model.value}/{self.T}/{self.tau!r}"


class ExperimentConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="MANISTAT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    experiment: ExperimentKind = ExperimentKind.Table1
    replicates: int = Field(500, gt=0)
    T_values: Optional[list[int]] = None
    taus: Optional[list[float]] = None
    models: Optional[list[SimModel]] = None
    methods: Optional[list[BootstrapMethod]] = None
    bootstrap_B: int = Field(500, gt=0)
    block_policy: str = "auto"
    alpha: float = Field(0.05, gt=0, lt=1)
    seed: int = Field(0, ge=0, lt=2**64)
    burn_in: int = Field(50, ge=0)
    out: pathlib.Path = pathlib.Path("results/experiment")
    # None uses every available core
    threads: Optional[int] = Field(None, gt=0)

    @field_validator("T_values", "taus", "models", "methods", mode="before")
    @classmethod
    def _split_commas(cls, value):
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @property
    def is_second_order(self) -> bool:
        return self.experiment in (
            ExperimentKind.Table2,
            ExperimentKind.PowerSecond,
        )

    def cells(self) -> list[Cell]:
        """Expands the grid in a fixed order: model, T, tau, method."""
        kind = self.experiment
        models = self.models or _DEFAULT_MODELS[kind]
        T_values = self.T_values or _DEFAULT_T[kind]
        taus = self.taus if self.taus is not None else _DEFAULT_TAUS[kind]
        if self.is_second_order:
            methods = [SECOND_ORDER]
        else:
            methods = [m.value for m in self.methods or _DEFAULT_METHODS[kind]]
        if self.replicates < 100:
            logger.warning(
                f"{self.replicates} replicates is below the 100 needed for "
                f"acceptance-grade rejection rates"
            )
        return [
            Cell(
                experiment=kind,
                model=model,
                method=method,
                T=T,
                tau=tau,
                n_policy=self.block_policy,
                replicates=self.replicates,
                seed=self.seed,
            )
            for model in models
            for T in T_values
            for tau in taus
            for method in methods
        ]


def load_config_file(path: Optional[pathlib.Path]) -> dict[str, str]:
    """Reads a flat key=value file; keys are ExperimentConfig field names."""
    if path is None:
        return {}
    path = pathlib.Path(path)
    if not path.is_file():
        raise InvalidInputError(f"config file {path} does not exist")
    values = {k: v for k, v in dotenv_values(path).items() if v is not None}
    unknown = sorted(set(values) - set(ExperimentConfig.model_fields))
    if unknown:
        raise InvalidInputError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return values
