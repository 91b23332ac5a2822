"""Local periodograms of tangent coordinates over blocks of the series.

The module includes the following functions:
- `tangent_coordinates`: Coordinates of Log_mean X_i in an orthonormal basis.
- `block_layout`: The blocks used by the statistic, default tiling or an
  explicit list of (possibly overlapping) starts.
- `block_dft`: J_n(omega_k, t_j) for every block and k = 0..n/2 in one FFT.
- `local_periodogram`: J_n and I_n at one arbitrary (omega, t).

Typical usage example:

    coords = tangent_coordinates(series, mean, basis)
    layout = block_layout(len(coords), block_n=32)
    J = block_dft(coords, layout)
"""

from typing import Optional, Sequence

import numpy as np
from scipy import fft

from manistat.exceptions import BlockIndexError, InvalidInputError, PreconditionError
from manistat.geometry import ManifoldPoint, ManifoldSeries, OrthonormalBasis
from manistat.second_order.schemas import BlockLayout, LocalPeriodogram
from manistat.utils import get_logger

logger = get_logger(__name__)


def tangent_coordinates(
    series: ManifoldSeries, mean: ManifoldPoint, basis: OrthonormalBasis
) -> np.ndarray:
    """Returns the (T, d) coordinates of Log_mean X_i in `basis`."""
    return basis.coords(series.manifold.log_map(mean, series.points))


def default_block_n(T: int) -> int:
    """Largest even n with n <= T/8 (at least 2)."""
    return max(2, (T // 8) // 2 * 2)


def block_layout(
    T: int, block_n: Optional[int] = None, starts: Optional[Sequence[int]] = None
) -> BlockLayout:
    """Builds the block layout for a series of length T.

    Without explicit starts the series is tiled by m = floor(T/n) blocks and
    trailing observations are dropped. Explicit 1-based starts may overlap;
    layouts that do not tile 1..m*n are flagged.

    Raises:
        BlockIndexError: if an explicit block runs outside 1..T.
    """
    n = block_n or default_block_n(T)
    if n < 2 or n % 2:
        raise InvalidInputError(f"block_n must be a positive even integer, got {n}")
    if starts:
        starts = [int(s) for s in starts]
        for j, s in enumerate(starts, start=1):
            if s < 1 or s + n - 1 > T:
                raise BlockIndexError(
                    f"block {j} covers observations {s}..{s + n - 1}, outside 1..{T}",
                    index=j,
                )
        tiling = starts == [1 + n * j for j in range(len(starts))]
        layout = BlockLayout(block_n=n, starts=starts, T=T, tiling=tiling, dropped=0)
        if not tiling:
            logger.warning(
                f"non-tiling blocks: starts {starts} with n={n}; "
                f"effective length m*n={layout.T_eff}"
            )
    else:
        m = T // n
        if m < 1:
            raise PreconditionError(f"block_n={n} exceeds the series length T={T}")
        dropped = T - m * n
        if dropped:
            logger.warning(
                f"T={T} is not a multiple of n={n}; dropping the last "
                f"{dropped} observations"
            )
        layout = BlockLayout(
            block_n=n,
            starts=[1 + n * j for j in range(m)],
            T=T,
            tiling=True,
            dropped=dropped,
        )
    if n < np.sqrt(T) or n > T ** (2.0 / 3.0):
        logger.warning(
            f"block size n={n} is outside the recommended range "
            f"T^(1/2)={np.sqrt(T):.1f} .. T^(2/3)={T ** (2.0 / 3.0):.1f}"
        )
    return layout


def block_dft(coords: np.ndarray, layout: BlockLayout) -> np.ndarray:
    """J_n(omega_k, t_j) = (2 pi n)^{-1/2} sum_h c_{s_j + h} e^{-i h omega_k}.

    Returns:
        A complex array of shape (m, n/2 + 1, d).
    """
    n = layout.block_n
    windows = np.stack([coords[s - 1 : s - 1 + n] for s in layout.starts])
    spectrum = fft.fft(windows, axis=1)[:, : n // 2 + 1]
    return spectrum / np.sqrt(2.0 * np.pi * n)


def local_periodogram(
    series: ManifoldSeries,
    mean: ManifoldPoint,
    basis: OrthonormalBasis,
    omega: float,
    t: float,
    n: int,
) -> LocalPeriodogram:
    """J_n(omega, t) over the window floor(tT)-n/2+1 .. floor(tT)+n/2.

    A window that would start at index 0 is shifted to start at 1.

    Raises:
        BlockIndexError: if the window leaves 1..T.
    """
    if n < 2 or n % 2:
        raise InvalidInputError(f"n must be a positive even integer, got {n}")
    T = len(series)
    start = int(np.floor(t * T + 1e-9)) - n // 2 + 1
    if start == 0:
        logger.warning(f"window for t={t:.4g} starts at index 0; shifted to 1")
        start = 1
    if start < 1 or start + n - 1 > T:
        raise BlockIndexError(
            f"window {start}..{start + n - 1} for t={t:.4g}, n={n} is outside 1..{T}"
        )
    window = series.points[start - 1 : start - 1 + n]
    coords = basis.coords(series.manifold.log_map(mean, window))
    phase = np.exp(-1j * omega * np.arange(n))
    J = phase @ coords / np.sqrt(2.0 * np.pi * n)
    return LocalPeriodogram(J=J, omega=float(omega), t=float(t))
