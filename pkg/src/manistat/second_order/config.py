"""This module contains the configuration of the second-order stationarity test.

Typical usage example:

  from manistat.second_order.config import SecondOrderConfig
  config = SecondOrderConfig(block_n=32, detrend="block_frechet")
"""

from enum import Enum
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from manistat.exceptions import InvalidInputError
from manistat.frechet import FrechetConfig


class DetrendMode(str, Enum):
    none = "none"
    block_frechet = "block_frechet"


class WScale(str, Enum):
    bias_corrected = "bias_corrected"
    literal = "literal"


class SecondOrderConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="MANISTAT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # None picks the largest even n <= T/8
    block_n: Optional[int] = None
    # 1-based block starts; blocks may overlap
    block_starts: Optional[list[int]] = None
    alpha: float = Field(0.05, gt=0, lt=1)
    detrend: DetrendMode = DetrendMode.none
    # None means floor(T/5)
    bandwidth: Optional[int] = None
    w_scale: WScale = WScale.bias_corrected
    frechet: FrechetConfig = FrechetConfig()

    @field_validator("block_n")
    @classmethod
    def _check_even(cls, block_n: Optional[int]) -> Optional[int]:
        if block_n is not None and (block_n < 2 or block_n % 2):
            raise InvalidInputError(f"block_n must be a positive even integer, got {block_n}")
        return block_n

    @field_validator("bandwidth")
    @classmethod
    def _check_bandwidth(cls, bandwidth: Optional[int]) -> Optional[int]:
        if bandwidth is not None and bandwidth < 2:
            raise InvalidInputError(f"bandwidth must be at least 2, got {bandwidth}")
        return bandwidth
