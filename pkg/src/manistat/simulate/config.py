"""Configuration of the simulation models.

Typical usage example:

  spec = SimSpec(model="M1", tau=0.5, T=100, seed=3)
  series = simulate(spec)
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from manistat.geometry import ManifoldDescriptor


class SimModel(str, Enum):
    M1 = "M1"
    M2 = "M2"
    M3_sphere = "M3_sphere"
    M3_spd = "M3_spd"
    EuclideanAR = "EuclideanAR"


class SimSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: SimModel
    tau: float = Field(0.0, ge=0)
    T: int = Field(..., gt=0)
    seed: int = Field(0, ge=0, lt=2**64)
    burn_in: int = Field(50, ge=0)

    @property
    def descriptor(self) -> ManifoldDescriptor:
        if self.model in (SimModel.M1, SimModel.M3_sphere):
            return ManifoldDescriptor.sphere(6)
        if self.model in (SimModel.M2, SimModel.M3_spd):
            return ManifoldDescriptor.spd(3)
        return ManifoldDescriptor.euclidean(6)
