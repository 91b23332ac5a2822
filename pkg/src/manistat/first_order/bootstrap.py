"""This module implements the first-order stationarity test.

The curvature adjusted multiplier bootstrap (CAMB) and its two baselines share
one engine: moving-block sums of the residuals are multiplied by i.i.d.
standard normal weights, accumulated, and compared against the bridge
correction at the last index. The three methods differ only in the residuals
and the correction operators:

- CAMB: tangent coordinates at the intrinsic mean, operators H_k H_T^{-1}.
- B1: tangent coordinates at the intrinsic mean, operators (k/T) Id.
- B2: ambient coordinates minus the ambient average, operators (k/T) Id.

Every bootstrap draw b uses its own generator derived from (seed, stream, b),
so reports are reproducible and independent of chunking.

Typical usage example:

    report = first_order_test(series, FirstOrderConfig(seed=11))
    print(report.p_value, report.block_n)
"""

from functools import partial
from typing import Callable, Optional, Sequence

import numpy as np

from manistat.exceptions import PreconditionError
from manistat.first_order.config import BootstrapMethod, FirstOrderConfig
from manistat.first_order.cusum import (
    curvature_adjustment,
    cusum_max,
    hessian_process,
    tangent_residuals,
)
from manistat.first_order.schemas import (
    BlockSelection,
    FirstOrderReport,
    HessianDiagnostics,
)
from manistat.frechet import FrechetDiagnostics, frechet_mean
from manistat.geometry import ManifoldPoint, ManifoldSeries
from manistat.utils import get_logger, substream_rng

logger = get_logger(__name__)

DRAW_STREAM = 0
PILOT_STREAM = 1
_CHUNK = 64

AdjustmentFactory = Callable[[int], Optional[np.ndarray]]


def _flat_bridge(block_n: int) -> None:
    return None


def block_sums(residuals: np.ndarray, block_n: int) -> np.ndarray:
    """S_{j,n} = sum_{i=j}^{j+n-1} r_i for j = 1..T-n+1."""
    padded = np.concatenate(
        [np.zeros((1,) + residuals.shape[1:]), np.cumsum(residuals, axis=0)]
    )
    return padded[block_n:] - padded[:-block_n]


def multiplier_draws(
    residuals: np.ndarray,
    block_n: int,
    adjustment: Optional[np.ndarray],
    n_draws: int,
    seed: int,
    stream: Sequence[int],
) -> np.ndarray:
    """Bootstrap replicates Q^(b) of the CUSUM statistic.

    Args:
        residuals: (T, d) residuals in orthonormal coordinates.
        block_n: Block length n.
        adjustment: (T-2n+2, d, d) operators applied to V_{T-n+1}, or None for
            the flat-space bridge (k/T) Id.
        n_draws: Number of draws B.
        seed: Base seed.
        stream: Integer keys that separate this family of draws from others.

    Returns:
        An array of B nonnegative reals.
    """
    T = len(residuals)
    blocks = block_sums(residuals, block_n)
    n_blocks = len(blocks)
    scale = 1.0 / np.sqrt(block_n * n_blocks)
    k = np.arange(block_n, n_blocks + 1)
    draws = np.empty(n_draws)
    for start in range(0, n_draws, _CHUNK):
        stop = min(start + _CHUNK, n_draws)
        weights = np.stack(
            [
                substream_rng(seed, *stream, b).standard_normal(n_blocks)
                for b in range(start, stop)
            ]
        )
        v = scale * np.cumsum(blocks[None] * weights[..., None], axis=1)
        last = v[:, -1]
        v_k = v[:, block_n - 1 :]
        if adjustment is None:
            bridge = (k / T)[None, :, None] * last[:, None, :]
        else:
            bridge = np.einsum("kij,bj->bki", adjustment, last)
        draws[start:stop] = np.linalg.norm(v_k - bridge, axis=-1).max(axis=1)
    return draws


def candidate_block_sizes(T: int) -> list[int]:
    """Default candidates n = 2..floor(3 sqrt(T)), capped at floor(T/4)."""
    upper = min(int(np.floor(3.0 * np.sqrt(T))), T // 4)
    return list(range(2, upper + 1))


def minimum_volatility(
    residuals: np.ndarray,
    adjustment_for: AdjustmentFactory,
    cfg: FirstOrderConfig,
    candidates: Optional[Sequence[int]] = None,
) -> BlockSelection:
    """Chooses the block size whose pilot bootstrap quantile varies least.

    For each candidate n a pilot bootstrap with `cfg.pilot_B` draws gives the
    quantile q(n); the volatility of n is the standard deviation of q over n
    and its immediate neighbours (two values at either end of the range).
    Ties go to the smallest n.
    """
    T = len(residuals)
    candidates = sorted(candidates or candidate_block_sizes(T))
    if len(candidates) < 3:
        raise PreconditionError(
            f"block-size selection needs at least 3 candidates, got {candidates} "
            f"for T={T}"
        )
    if candidates[0] < 2 or candidates[-1] > T // 4:
        raise PreconditionError(
            f"candidate block sizes must lie in [2, {T // 4}] for T={T}"
        )
    quantiles = np.array(
        [
            np.quantile(
                multiplier_draws(
                    residuals,
                    n,
                    adjustment_for(n),
                    cfg.pilot_B,
                    cfg.seed,
                    (PILOT_STREAM, n),
                ),
                cfg.pilot_quantile,
            )
            for n in candidates
        ]
    )
    volatility = np.array(
        [
            np.std(quantiles[max(i - 1, 0) : i + 2])
            for i in range(len(candidates))
        ]
    )
    selected = candidates[int(np.argmin(volatility))]
    logger.info(f"Minimum-volatility block size: n={selected}")
    return BlockSelection(
        candidates=candidates,
        quantiles=quantiles.tolist(),
        volatility=volatility.tolist(),
        selected=selected,
    )


def _check_block_size(T: int, block_n: int) -> None:
    if block_n < 1 or 4 * block_n > T:
        raise PreconditionError(
            f"block size n={block_n} needs T >= 4n, got T={T}"
        )


def _run(
    method: BootstrapMethod,
    residuals: np.ndarray,
    adjustment_for: AdjustmentFactory,
    cfg: FirstOrderConfig,
    hessian_trace: Optional[HessianDiagnostics] = None,
    frechet: Optional[FrechetDiagnostics] = None,
) -> FirstOrderReport:
    T = len(residuals)
    selection = None
    block_n = cfg.block_n
    if block_n is None:
        selection = minimum_volatility(residuals, adjustment_for, cfg)
        block_n = selection.selected
    _check_block_size(T, block_n)
    q_t = cusum_max(residuals)
    draws = multiplier_draws(
        residuals,
        block_n,
        adjustment_for(block_n),
        cfg.bootstrap_B,
        cfg.seed,
        (DRAW_STREAM,),
    )
    p_value = float(np.mean(draws >= q_t))
    return FirstOrderReport(
        method=method,
        T=T,
        Q_T=q_t,
        p_value=p_value,
        alpha=cfg.alpha,
        reject=p_value <= cfg.alpha,
        bootstrap_draws=draws,
        block_n=block_n,
        seed=cfg.seed,
        hessian_trace=hessian_trace,
        block_selection=selection,
        frechet=frechet,
    )


def _coordinates(series: ManifoldSeries, mean: ManifoldPoint):
    basis = series.manifold.standard_basis(mean.coords)
    return basis, basis.coords(tangent_residuals(series, mean))


def camb_bootstrap(
    series: ManifoldSeries,
    mean: ManifoldPoint,
    cfg: FirstOrderConfig,
    frechet: Optional[FrechetDiagnostics] = None,
) -> FirstOrderReport:
    """Curvature adjusted multiplier bootstrap around the intrinsic mean."""
    basis, residuals = _coordinates(series, mean)
    process = hessian_process(series, mean, basis)
    return _run(
        BootstrapMethod.camb,
        residuals,
        partial(curvature_adjustment, process),
        cfg,
        hessian_trace=process.diagnostics,
        frechet=frechet,
    )


def b1_bootstrap(
    series: ManifoldSeries,
    mean: ManifoldPoint,
    cfg: FirstOrderConfig,
    frechet: Optional[FrechetDiagnostics] = None,
) -> FirstOrderReport:
    """Multiplier bootstrap in tangent coordinates that ignores curvature."""
    _, residuals = _coordinates(series, mean)
    return _run(BootstrapMethod.b1, residuals, _flat_bridge, cfg, frechet=frechet)


def ambient_residuals(series: ManifoldSeries) -> np.ndarray:
    """Flattened ambient coordinates minus their sample average."""
    flat = series.points.reshape(len(series), -1)
    return flat - flat.mean(axis=0)


def b2_bootstrap(series: ManifoldSeries, cfg: FirstOrderConfig) -> FirstOrderReport:
    """Multiplier bootstrap that treats the ambient coordinates as Euclidean."""
    return _run(BootstrapMethod.b2, ambient_residuals(series), _flat_bridge, cfg)


def select_block_size(
    series: ManifoldSeries,
    mean: Optional[ManifoldPoint] = None,
    candidates: Optional[Sequence[int]] = None,
    cfg: Optional[FirstOrderConfig] = None,
) -> int:
    """Minimum-volatility block size for the configured method."""
    cfg = cfg or FirstOrderConfig()
    if cfg.method is BootstrapMethod.b2:
        residuals = ambient_residuals(series)
        adjustment_for: AdjustmentFactory = _flat_bridge
    else:
        if mean is None:
            mean, _ = frechet_mean(series, cfg.frechet)
        basis, residuals = _coordinates(series, mean)
        adjustment_for = _flat_bridge
        if cfg.method is BootstrapMethod.camb:
            process = hessian_process(series, mean, basis)
            adjustment_for = partial(curvature_adjustment, process)
    return minimum_volatility(residuals, adjustment_for, cfg, candidates).selected


def first_order_test(
    series: ManifoldSeries, cfg: Optional[FirstOrderConfig] = None
) -> FirstOrderReport:
    """Runs the full first-order test with the configured method.

    Args:
        series: The observed series X_1..X_T.
        cfg: Test settings; defaults to `FirstOrderConfig()`.

    Returns:
        A `FirstOrderReport`; `reject` is True when p_value <= alpha.
    """
    cfg = cfg or FirstOrderConfig()
    if cfg.method is BootstrapMethod.b2:
        return b2_bootstrap(series, cfg)
    mean, diagnostics = frechet_mean(series, cfg.frechet)
    if cfg.method is BootstrapMethod.b1:
        return b1_bootstrap(series, mean, cfg, frechet=diagnostics)
    return camb_bootstrap(series, mean, cfg, frechet=diagnostics)
