"""Configuration of the intrinsic mean solver.

Typical usage example:

  cfg = FrechetConfig(max_iter=500, init="first_point")
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class FrechetInit(str, Enum):
    first_point = "first_point"
    extrinsic_projection = "extrinsic_projection"
    user_supplied = "user_supplied"


class FrechetConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_iter: int = Field(200, gt=0)
    # stopping rule on the norm of the mean log vector
    tol: float = Field(1e-9, gt=0)
    step: float = Field(1.0, gt=0, le=1)
    init: FrechetInit = FrechetInit.extrinsic_projection
