"""Result records of the second-order test."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from manistat.frechet import FrechetDiagnostics
from manistat.geometry import ManifoldPoint, OrthonormalBasis
from manistat.second_order.config import DetrendMode, WScale


class LocalPeriodogram(BaseModel):
    """J_n(omega, t) in a fixed orthonormal basis and I_n = J J^*."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    J: np.ndarray
    omega: float
    t: float

    @property
    def I(self) -> np.ndarray:  # noqa: E743
        return np.outer(self.J, np.conj(self.J))


class BlockLayout(BaseModel):
    block_n: int
    starts: list[int]
    T: int
    tiling: bool
    dropped: int

    @property
    def m(self) -> int:
        return len(self.starts)

    @property
    def T_eff(self) -> int:
        return self.m * self.block_n

    def centers(self) -> list[float]:
        """Block centers t_j = (start_j - 1 + n/2) / T."""
        return [(s - 1 + self.block_n // 2) / self.T for s in self.starts]


class V2Summary(BaseModel):
    """The squared-variation statistic with its three terms kept apart."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    layout: BlockLayout
    # J[j, k] = J_n(omega_k, t_j) for k = 0..n/2, shape (m, n/2 + 1, d)
    J: np.ndarray
    cross_term: float
    W_hat: float
    mean_term: float
    w_scale: WScale

    @property
    def V2_hat(self) -> float:
        return self.cross_term + self.W_hat - self.mean_term

    @property
    def omegas(self) -> np.ndarray:
        n = self.layout.block_n
        return 2.0 * np.pi * np.arange(n // 2 + 1) / n

    def periodogram(self, j: int, k: int) -> LocalPeriodogram:
        """The periodogram of block j (1-based) at frequency index k."""
        return LocalPeriodogram(
            J=self.J[j - 1, k],
            omega=float(self.omegas[k]),
            t=self.layout.centers()[j - 1],
        )

    def periodograms(self) -> list[LocalPeriodogram]:
        return [
            self.periodogram(j, k)
            for j in range(1, self.layout.m + 1)
            for k in range(self.layout.block_n // 2 + 1)
        ]


class DetrendResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coords: np.ndarray
    base: ManifoldPoint
    basis: OrthonormalBasis
    # estimated mean curve, one point per observation
    curve: np.ndarray
    bandwidth: int


class SecondOrderReport(BaseModel):
    V2_hat: float
    W_hat: float
    cross_term: float
    mean_term: float
    sigma2_hat: float
    z: float
    p_value: float
    alpha: float
    reject: bool
    block_n: int
    m: int
    T: int
    T_eff: int
    block_starts: list[int]
    tiling: bool
    dropped: int
    detrend: DetrendMode
    bandwidth: Optional[int] = None
    w_scale: WScale
    frechet: Optional[FrechetDiagnostics] = None
