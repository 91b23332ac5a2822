"""Block-Fréchet detrending for series with a time-varying mean.

The mean curve is estimated by intrinsic means over centred sliding windows
of half-width bandwidth // 2, continued along a geodesic where a centred
window no longer fits at the ends of the series. A frame at
the first curve point is carried along the piecewise-geodesic curve by
parallel transport, and each residual Log_{mu_i} X_i is expressed in the
frame at mu_i. The coordinates are therefore those of the residuals
transported back to mu_1.

Typical usage example:

    result = detrend(series, bandwidth=64)
    summary = v2_statistic(result.coords, cfg)
"""

from typing import Optional

import numpy as np

from manistat.exceptions import PreconditionError
from manistat.frechet import FrechetConfig, FrechetInit, check_hemisphere, karcher_mean
from manistat.geometry import ManifoldKind, ManifoldPoint, ManifoldSeries, OrthonormalBasis
from manistat.second_order.schemas import DetrendResult
from manistat.utils import get_logger

logger = get_logger(__name__)


def default_bandwidth(T: int) -> int:
    return T // 5


def _continue_along(
    manifold, anchor: np.ndarray, toward: np.ndarray, s: np.ndarray
) -> np.ndarray:
    """Exp_anchor(s Log_anchor(toward)) for every entry of s."""
    v = manifold.log_map(anchor, toward)
    return manifold.exp_map(anchor, s.reshape(s.shape + (1,) * v.ndim) * v)


def mean_curve(
    series: ManifoldSeries, bandwidth: int, cfg: Optional[FrechetConfig] = None
) -> np.ndarray:
    """Intrinsic means over centred windows i-h..i+h, h = bandwidth // 2.

    Within h points of either end a centred window does not fit. There the
    curve continues along the geodesic through the outermost centred mean and
    the centred mean one window length further in, so a geodesic trend is
    reproduced up to the ends.
    """
    cfg = cfg or FrechetConfig()
    warm = cfg.model_copy(update={"init": FrechetInit.user_supplied})
    manifold = series.manifold
    points = series.points
    T = len(series)
    h = min(bandwidth // 2, (T - 1) // 2)
    first, last = h, T - 1 - h
    curve = np.empty_like(points)
    previous = None
    for i in range(first, last + 1):
        window = points[i - h : i + h + 1]
        if previous is None:
            mu, _ = karcher_mean(manifold, window, cfg)
        else:
            mu, _ = karcher_mean(manifold, window, warm, initial=previous)
        curve[i] = mu
        previous = mu

    step = min(2 * h + 1, last - first)
    if step == 0:
        curve[:first] = curve[first]
        curve[last + 1 :] = curve[last]
        return curve
    head = (np.arange(first) - first) / step
    tail = (np.arange(last + 1, T) - last) / -step
    curve[:first] = _continue_along(manifold, curve[first], curve[first + step], head)
    curve[last + 1 :] = _continue_along(
        manifold, curve[last], curve[last - step], tail
    )
    return curve


def detrend(
    series: ManifoldSeries,
    bandwidth: Optional[int] = None,
    cfg: Optional[FrechetConfig] = None,
    basis: Optional[OrthonormalBasis] = None,
) -> DetrendResult:
    """Removes a smooth mean curve and returns residual coordinates at mu_1.

    Args:
        series: The observed series.
        bandwidth: Window length of the smoother; defaults to floor(T/5).
        cfg: Settings for the windowed intrinsic means.
        basis: Orthonormal basis at any point; it is transported to mu_1.
            Defaults to the standard basis at mu_1.

    Returns:
        A `DetrendResult` with (T, d) coordinates, the base point mu_1, the
        frame at mu_1 and the estimated curve.

    Raises:
        PreconditionError: if the bandwidth is below 2.
    """
    T = len(series)
    bandwidth = default_bandwidth(T) if bandwidth is None else bandwidth
    if bandwidth < 2:
        raise PreconditionError(f"detrend bandwidth must be at least 2, got {bandwidth}")
    manifold = series.manifold
    if series.descriptor.kind is ManifoldKind.sphere:
        check_hemisphere(series.points)

    curve = mean_curve(series, bandwidth, cfg)
    if basis is None:
        initial = manifold.standard_basis(curve[0])
    else:
        vectors = manifold.parallel_transport(basis.vectors, basis.base, curve[0])
        initial = manifold.make_basis(curve[0], vectors)
    frames = manifold.parallel_frame(curve, initial)
    residuals = manifold.log_map(curve, series.points)
    coords = np.stack([frame.coords(v) for frame, v in zip(frames, residuals)])
    logger.debug(f"detrended T={T} observations with bandwidth {bandwidth}")
    return DetrendResult(
        coords=coords,
        base=ManifoldPoint(descriptor=series.descriptor, coords=curve[0]),
        basis=initial,
        curve=curve,
        bandwidth=bandwidth,
    )
