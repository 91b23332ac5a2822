"""This module contains the configuration of the first-order stationarity test.

`FirstOrderConfig` collects the bootstrap settings of the curvature adjusted
multiplier bootstrap and its two baselines. Values may come from keyword
arguments, `MANISTAT_*` environment variables or a `.env` file.

Typical usage example:

  from manistat.first_order.config import FirstOrderConfig
  config = FirstOrderConfig(method="b1", seed=7)
  print(config.bootstrap_B)
"""

from enum import Enum
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from manistat.frechet import FrechetConfig


class BootstrapMethod(str, Enum):
    camb = "camb"
    b1 = "b1"
    b2 = "b2"


class FirstOrderConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="MANISTAT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    bootstrap_B: int = Field(2000, gt=0)
    # None selects the block size by minimum volatility
    block_n: Optional[int] = Field(None, gt=0)
    seed: int = Field(0, ge=0, lt=2**64)
    method: BootstrapMethod = BootstrapMethod.camb
    alpha: float = Field(0.05, gt=0, lt=1)
    # minimum-volatility selector
    pilot_B: int = Field(200, gt=0)
    pilot_quantile: float = Field(0.95, gt=0, lt=1)
    frechet: FrechetConfig = FrechetConfig()
