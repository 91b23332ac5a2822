from manistat.second_order.config import DetrendMode, SecondOrderConfig, WScale
from manistat.second_order.detrend import detrend, mean_curve
from manistat.second_order.periodogram import (
    block_dft,
    block_layout,
    default_block_n,
    local_periodogram,
    tangent_coordinates,
)
from manistat.second_order.schemas import (
    BlockLayout,
    DetrendResult,
    LocalPeriodogram,
    SecondOrderReport,
    V2Summary,
)
from manistat.second_order.statistic import (
    second_order_test,
    sigma2_estimator,
    v2_statistic,
)

__all__ = [
    "BlockLayout",
    "DetrendMode",
    "DetrendResult",
    "LocalPeriodogram",
    "SecondOrderConfig",
    "SecondOrderReport",
    "V2Summary",
    "WScale",
    "block_dft",
    "block_layout",
    "default_block_n",
    "detrend",
    "local_periodogram",
    "mean_curve",
    "second_order_test",
    "sigma2_estimator",
    "tangent_coordinates",
    "v2_statistic",
]
