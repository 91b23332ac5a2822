"""This module estimates intrinsic (Fréchet) means by Riemannian gradient descent.

The module includes the following functions:
- `frechet_mean`: Validates a series and returns its intrinsic mean with
  solver diagnostics.
- `karcher_mean`: The iteration itself on a raw point array; used by callers
  that have already validated their data.
- `check_hemisphere`: Rejects sphere data whose pairwise distances reach pi.
- `extrinsic_mean`: The ambient average projected back onto the manifold.

Typical usage example:

    mean, diagnostics = frechet_mean(series, FrechetConfig())
    if not diagnostics.converged:
        ...
"""

from typing import Optional

import numpy as np

from manistat.exceptions import DegenerateDataError, InvalidInputError, PreconditionError
from manistat.frechet.config import FrechetConfig, FrechetInit
from manistat.frechet.schemas import FrechetDiagnostics
from manistat.geometry import (
    Manifold,
    ManifoldDescriptor,
    ManifoldKind,
    ManifoldPoint,
    ManifoldSeries,
)
from manistat.utils import get_logger

logger = get_logger(__name__)

HEMISPHERE_MARGIN = 1e-6
_GRAM_CHUNK = 1024


def check_hemisphere(points: np.ndarray) -> None:
    """Requires every pairwise geodesic distance to stay below pi - 1e-6.

    Raises:
        PreconditionError: naming the offending pair.
    """
    threshold = -np.cos(HEMISPHERE_MARGIN)
    for start in range(0, len(points), _GRAM_CHUNK):
        gram = points[start : start + _GRAM_CHUNK] @ points.T
        if gram.min() <= threshold:
            i, j = np.unravel_index(int(np.argmin(gram)), gram.shape)
            raise PreconditionError(
                f"observations {start + i + 1} and {j + 1} are (nearly) "
                f"antipodal; sphere data must lie in an open hemisphere",
                index=start + i + 1,
            )


def extrinsic_mean(descriptor: ManifoldDescriptor, points: np.ndarray) -> np.ndarray:
    average = points.mean(axis=0)
    if descriptor.kind is ManifoldKind.sphere:
        norm = np.linalg.norm(average)
        if norm < 1e-12:
            raise DegenerateDataError("ambient average of sphere data is zero")
        return average / norm
    return average


def karcher_mean(
    manifold: Manifold,
    points: np.ndarray,
    cfg: FrechetConfig,
    initial: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, FrechetDiagnostics]:
    """Runs mu <- exp(mu, step * mean_i Log_mu X_i) until the gradient is below tol."""
    if cfg.init is FrechetInit.user_supplied:
        if initial is None:
            raise InvalidInputError("init=user_supplied needs an initial point")
        mu = np.asarray(initial, dtype=float)
    elif cfg.init is FrechetInit.first_point:
        mu = points[0]
    else:
        mu = extrinsic_mean(manifold.descriptor, points)

    objective: list[float] = []
    grad_norm = np.inf
    iterations = 0
    converged = False
    while True:
        logs = manifold.log_map(mu, points)
        sq = manifold.norm(mu, logs) ** 2
        objective.append(float(np.sum(sq)))
        gradient = logs.mean(axis=0)
        grad_norm = float(manifold.norm(mu, gradient))
        if grad_norm <= cfg.tol:
            converged = True
            break
        if iterations >= cfg.max_iter:
            break
        mu = manifold.exp_map(mu, cfg.step * gradient)
        iterations += 1

    if not converged:
        logger.warning(
            f"Fréchet mean did not converge in {cfg.max_iter} iterations "
            f"(gradient norm {grad_norm:.3g}, tol {cfg.tol:.1g})"
        )
    diagnostics = FrechetDiagnostics(
        iterations=iterations,
        grad_norm=grad_norm,
        converged=converged,
        objective=objective,
    )
    return mu, diagnostics


def frechet_mean(
    series: ManifoldSeries,
    cfg: Optional[FrechetConfig] = None,
    initial: Optional[ManifoldPoint] = None,
) -> tuple[ManifoldPoint, FrechetDiagnostics]:
    """Estimates the intrinsic mean of a series.

    Args:
        series: The sample; sphere data must lie in an open hemisphere.
        cfg: Solver settings, defaults to `FrechetConfig()`.
        initial: Starting point, required when `cfg.init` is user_supplied.

    Returns:
        The mean as a `ManifoldPoint` and the solver diagnostics.
    """
    cfg = cfg or FrechetConfig()
    manifold = series.manifold
    if series.descriptor.kind is ManifoldKind.sphere:
        check_hemisphere(series.points)
    start = None
    if initial is not None:
        start = manifold.as_array(initial, "initial point")
    mu, diagnostics = karcher_mean(manifold, series.points, cfg, start)
    return ManifoldPoint(descriptor=series.descriptor, coords=mu), diagnostics
