"""Result records of the first-order test."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer

from manistat.first_order.config import BootstrapMethod
from manistat.frechet import FrechetDiagnostics
from manistat.geometry import OrthonormalBasis, SelfAdjointOperator


class HessianDiagnostics(BaseModel):
    min_eigenvalue: float
    max_eigenvalue: float
    condition: float
    trace: float


class HessianProcess(BaseModel):
    """Partial sums H_j = T^{-1} sum_{i<=j} H(mean, X_i) for j = 1..T."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis: OrthonormalBasis
    matrices: np.ndarray
    diagnostics: HessianDiagnostics

    def __len__(self) -> int:
        return len(self.matrices)

    def operator(self, j: int) -> SelfAdjointOperator:
        """H_j as an operator, for a 1-based index j."""
        return SelfAdjointOperator(base=self.basis.base, matrix=self.matrices[j - 1])


class BlockSelection(BaseModel):
    candidates: list[int]
    quantiles: list[float]
    volatility: list[float]
    selected: int


class FirstOrderReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    method: BootstrapMethod
    T: int
    Q_T: float
    p_value: float
    alpha: float
    reject: bool
    bootstrap_draws: np.ndarray
    block_n: int
    seed: int
    hessian_trace: Optional[HessianDiagnostics] = None
    block_selection: Optional[BlockSelection] = None
    frechet: Optional[FrechetDiagnostics] = None

    @field_serializer("bootstrap_draws")
    def _draws_to_list(self, draws: np.ndarray) -> list[float]:
        return draws.tolist()
