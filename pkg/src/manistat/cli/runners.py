"""End-to-end pipelines behind `manistat test first-order` and `test second-order`.

Typical usage example:

    report = run_first_order("series.csv", FirstOrderConfig(seed=3))
    print(report.report.p_value)
"""

import pathlib
from typing import Any, Optional

from manistat.cli.ingest import PathLike, ingest
from manistat.cli.schemas import ReportFile
from manistat.first_order import FirstOrderConfig, first_order_test
from manistat.second_order import SecondOrderConfig, second_order_test
from manistat.utils import Timer, get_logger

logger = get_logger(__name__)


def _inputs(path: PathLike, cfg, **ingest_kwargs: Any) -> dict[str, Any]:
    return {
        "path": str(path),
        **{k: v for k, v in ingest_kwargs.items() if v is not None},
        **cfg.model_dump(mode="json"),
    }


def run_first_order(
    path: PathLike,
    cfg: Optional[FirstOrderConfig] = None,
    manifold: Optional[str] = None,
    ambient_dim: Optional[int] = None,
    compositional: bool = False,
) -> ReportFile:
    """ingest -> intrinsic mean -> bootstrap test -> report."""
    cfg = cfg or FirstOrderConfig()
    with Timer() as timer:
        series = ingest(path, manifold, ambient_dim, compositional)
        report = first_order_test(series, cfg)
    logger.info(
        f"first-order {report.method.value}: Q_T={report.Q_T:.4g} "
        f"p={report.p_value:.4g} n={report.block_n}"
    )
    return ReportFile(
        command="test first-order",
        inputs=_inputs(
            path,
            cfg,
            manifold=manifold,
            ambient_dim=ambient_dim,
            compositional=compositional,
        ),
        seed=cfg.seed,
        report=report,
        elapsed=timer.elapsed,
    )


def run_second_order(
    path: PathLike,
    cfg: Optional[SecondOrderConfig] = None,
    manifold: Optional[str] = None,
    ambient_dim: Optional[int] = None,
    compositional: bool = False,
) -> ReportFile:
    """ingest -> optional detrend -> squared-variation test -> report."""
    cfg = cfg or SecondOrderConfig()
    with Timer() as timer:
        series = ingest(path, manifold, ambient_dim, compositional)
        report = second_order_test(series, cfg)
    if not report.tiling:
        logger.warning("report uses non-tiling blocks")
    logger.info(
        f"second-order: V2={report.V2_hat:.4g} z={report.z:.3f} "
        f"p={report.p_value:.4g} n={report.block_n} m={report.m}"
    )
    return ReportFile(
        command="test second-order",
        inputs=_inputs(
            path,
            cfg,
            manifold=manifold,
            ambient_dim=ambient_dim,
            compositional=compositional,
        ),
        report=report,
        elapsed=timer.elapsed,
    )


def write_report(report: ReportFile, out: Optional[PathLike]) -> Optional[pathlib.Path]:
    """Writes the JSON report to `out`, or prints it when `out` is None."""
    text = report.model_dump_json(indent=2)
    if out is None:
        print(text)
        return None
    out = pathlib.Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text + "\n")
    return out
