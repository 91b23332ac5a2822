from manistat.first_order.bootstrap import (
    b1_bootstrap,
    b2_bootstrap,
    camb_bootstrap,
    candidate_block_sizes,
    first_order_test,
    multiplier_draws,
    select_block_size,
)
from manistat.first_order.config import BootstrapMethod, FirstOrderConfig
from manistat.first_order.cusum import (
    curvature_adjustment,
    cusum_statistic,
    hessian_process,
)
from manistat.first_order.schemas import (
    BlockSelection,
    FirstOrderReport,
    HessianDiagnostics,
    HessianProcess,
)

__all__ = [
    "BlockSelection",
    "BootstrapMethod",
    "FirstOrderConfig",
    "FirstOrderReport",
    "HessianDiagnostics",
    "HessianProcess",
    "b1_bootstrap",
    "b2_bootstrap",
    "camb_bootstrap",
    "candidate_block_sizes",
    "curvature_adjustment",
    "cusum_statistic",
    "first_order_test",
    "hessian_process",
    "multiplier_draws",
    "select_block_size",
]
