"""CUSUM statistic and Hessian partial-sum process at the intrinsic mean.

The module includes the following functions:
- `tangent_residuals`: Log_mean X_i for every observation, in ambient form.
- `cusum_statistic`: Q_T = max_j |S_j|_mean / sqrt(T) and the partial sums S_j.
- `hessian_process`: Running averages of H(mean, X_i) in a tangent basis.
- `curvature_adjustment`: The operators H_k H_T^{-1} used by the bootstrap.

Typical usage example:

    q_t, partial_sums = cusum_statistic(series, mean)
    process = hessian_process(series, mean, basis)
    adjustment = curvature_adjustment(process, block_n)
"""

import numpy as np

from manistat.exceptions import DegenerateDataError
from manistat.first_order.schemas import HessianDiagnostics, HessianProcess
from manistat.geometry import ManifoldPoint, ManifoldSeries, OrthonormalBasis
from manistat.utils import get_logger

logger = get_logger(__name__)

MIN_HESSIAN_EIGENVALUE = 1e-8


def tangent_residuals(series: ManifoldSeries, mean: ManifoldPoint) -> np.ndarray:
    """Returns v_i = Log_mean X_i; log-map errors carry the observation index."""
    return series.manifold.log_map(mean, series.points)


def cusum_max(residuals: np.ndarray) -> float:
    """max_j |sum_{i<=j} r_i| / sqrt(T) for residuals in orthonormal coordinates."""
    partial = np.cumsum(residuals, axis=0)
    return float(np.linalg.norm(partial, axis=-1).max() / np.sqrt(len(residuals)))


def cusum_statistic(
    series: ManifoldSeries, mean: ManifoldPoint
) -> tuple[float, np.ndarray]:
    manifold = series.manifold
    partial = np.cumsum(tangent_residuals(series, mean), axis=0)
    norms = manifold.norm(mean.coords, partial)
    return float(norms.max() / np.sqrt(len(series))), partial


def hessian_process(
    series: ManifoldSeries, mean: ManifoldPoint, basis: OrthonormalBasis
) -> HessianProcess:
    """Computes H_j = T^{-1} sum_{i<=j} H(mean, X_i) for j = 1..T.

    Raises:
        DegenerateDataError: if the smallest eigenvalue of H_T is below 1e-8.
    """
    manifold = series.manifold
    hessians = manifold.hessian_matrices(mean.coords, series.points, basis)
    matrices = np.cumsum(hessians, axis=0) / len(series)
    eigenvalues = np.linalg.eigvalsh(matrices[-1])
    lo, hi = float(eigenvalues[0]), float(eigenvalues[-1])
    if lo < MIN_HESSIAN_EIGENVALUE:
        raise DegenerateDataError(
            f"Hessian average H_T is near singular (smallest eigenvalue {lo:.3g})"
        )
    diagnostics = HessianDiagnostics(
        min_eigenvalue=lo,
        max_eigenvalue=hi,
        condition=hi / lo,
        trace=float(np.trace(matrices[-1])),
    )
    logger.debug(f"H_T eigenvalues in [{lo:.4g}, {hi:.4g}]")
    return HessianProcess(basis=basis, matrices=matrices, diagnostics=diagnostics)


def curvature_adjustment(process: HessianProcess, block_n: int) -> np.ndarray:
    """Returns H_k H_T^{-1} for k = n..T-n+1, shape (T-2n+2, d, d).

    H_T is inverted through its eigendecomposition; when H_T is exactly the
    identity the operators are the H_k themselves.
    """
    T = len(process)
    h_last = process.matrices[-1]
    window = process.matrices[block_n - 1 : T - block_n + 1]
    if np.array_equal(h_last, np.eye(len(h_last))):
        return window.copy()
    eigenvalues, eigenvectors = np.linalg.eigh(h_last)
    h_inv = (eigenvectors / eigenvalues) @ eigenvectors.T
    return window @ h_inv
