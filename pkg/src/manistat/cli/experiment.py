"""Monte Carlo harness for rejection rates of the stationarity tests.

Every replicate derives its own seeds from (config seed, cell data key,
replicate), so results do not depend on the number of worker processes or
on the order in which replicates finish. Methods that share a data key
(CAMB, B1 and B2 in one cell of Table1) are run on the same series.

The module includes the following functions:
- `run_replicate`: Simulates one series and returns whether the test rejects.
- `run_cell`: Rejection rate of one grid cell.
- `run_experiment`: Runs the whole grid and writes `<out>.csv` and `<out>.json`.

Typical usage example:

    report = run_experiment(ExperimentConfig(experiment="Table2", replicates=100))
"""

import pathlib
from multiprocessing import Pool, cpu_count
from multiprocessing.pool import Pool as WorkerPool
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from manistat.cli.config import SECOND_ORDER, Cell, ExperimentConfig, parse_block_policy
from manistat.cli.schemas import CELL_COLUMNS, CellResult, ReportFile
from manistat.exceptions import ManistatError
from manistat.first_order import BootstrapMethod, FirstOrderConfig, first_order_test
from manistat.second_order import SecondOrderConfig, second_order_test
from manistat.simulate import SimSpec, simulate
from manistat.utils import Timer, derive_seed, get_logger, stable_key

logger = get_logger(__name__)

TEST_STREAM = 1


class Job(NamedTuple):
    cell: Cell
    replicate: int
    bootstrap_B: int
    alpha: float
    burn_in: int


def replicate_seeds(cell: Cell, replicate: int) -> tuple[int, int]:
    """(data seed, test seed) of one replicate."""
    key = stable_key(cell.data_key)
    return (
        derive_seed(cell.seed, key, replicate),
        derive_seed(cell.seed, key, replicate, TEST_STREAM),
    )


def _reject(job: Job) -> bool:
    cell = job.cell
    data_seed, test_seed = replicate_seeds(cell, job.replicate)
    spec = SimSpec(
        model=cell.model, tau=cell.tau, T=cell.T, seed=data_seed, burn_in=job.burn_in
    )
    series = simulate(spec)
    if cell.method == SECOND_ORDER:
        cfg = SecondOrderConfig(
            block_n=parse_block_policy(cell.n_policy, cell.T, even=True),
            alpha=job.alpha,
        )
        return bool(second_order_test(series, cfg).reject)
    cfg = FirstOrderConfig(
        bootstrap_B=job.bootstrap_B,
        block_n=parse_block_policy(cell.n_policy, cell.T),
        seed=test_seed,
        method=BootstrapMethod(cell.method),
        alpha=job.alpha,
    )
    return bool(first_order_test(series, cfg).reject)


def run_replicate(job: Job) -> Optional[bool]:
    """Whether the test rejects on one simulated series; None if it failed."""
    try:
        return _reject(job)
    except ManistatError as e:
        logger.warning(
            f"{job.cell.data_key} {job.cell.method} replicate {job.replicate} "
            f"failed: {e.one_line()}"
        )
        return None


def run_cell(
    cell: Cell, cfg: ExperimentConfig, pool: Optional[WorkerPool] = None
) -> CellResult:
    jobs = [
        Job(cell, r, cfg.bootstrap_B, cfg.alpha, cfg.burn_in)
        for r in range(cell.replicates)
    ]
    desc = f"{cell.model.value} {cell.method} T={cell.T} tau={cell.tau:g}"
    with Timer() as timer:
        if pool is None:
            results = map(run_replicate, jobs)
        else:
            results = pool.imap(run_replicate, jobs)
        outcomes = list(tqdm(results, total=len(jobs), desc=desc, leave=False))
    rejects = np.array([o for o in outcomes if o is not None], dtype=bool)
    failures = len(outcomes) - len(rejects)
    if failures:
        logger.warning(f"{desc}: {failures} of {len(outcomes)} replicates failed")
    if len(rejects):
        rate = float(rejects.mean())
        stderr = float(np.sqrt(rate * (1.0 - rate) / len(rejects)))
    else:
        rate = stderr = float("nan")
    logger.info(f"{desc}: reject rate {rate:.4f} +- {stderr:.4f}")
    return CellResult(
        experiment=cell.experiment,
        manifold=cell.manifold,
        model=cell.model,
        method=cell.method,
        T=cell.T,
        tau=cell.tau,
        n_policy=cell.n_policy,
        replicates=cell.replicates,
        reject_rate=rate,
        stderr=stderr,
        failures=failures,
        seed=cell.seed,
        elapsed=timer.elapsed,
    )


def output_paths(out: pathlib.Path) -> tuple[pathlib.Path, pathlib.Path]:
    out = pathlib.Path(out)
    return out.with_suffix(".csv"), out.with_suffix(".json")


def _flush(report: ReportFile, out: pathlib.Path) -> None:
    csv_path, json_path = output_paths(out)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    rows = [cell.model_dump(mode="json") for cell in report.cells]
    pd.DataFrame(rows, columns=CELL_COLUMNS).to_csv(csv_path, index=False)
    json_path.write_text(report.model_dump_json(indent=2) + "\n")


def run_experiment(cfg: ExperimentConfig) -> ReportFile:
    """Runs every cell of the grid, flushing results after each cell.

    On KeyboardInterrupt the cells finished so far are written before the
    interrupt propagates.
    """
    cells = cfg.cells()
    report = ReportFile(
        command="experiment",
        inputs=cfg.model_dump(mode="json"),
        seed=cfg.seed,
    )
    processes = cfg.threads or cpu_count()
    logger.info(
        f"{cfg.experiment.value}: {len(cells)} cells x {cfg.replicates} "
        f"replicates on {processes} processes"
    )
    pool = Pool(processes) if processes > 1 else None
    with Timer() as timer:
        try:
            for cell in tqdm(cells, desc=cfg.experiment.value):
                report.cells.append(run_cell(cell, cfg, pool))
                report.elapsed = sum(c.elapsed for c in report.cells)
                _flush(report, cfg.out)
        except KeyboardInterrupt:
            logger.warning(
                f"interrupted after {len(report.cells)} of {len(cells)} cells; "
                f"writing partial results"
            )
            _flush(report, cfg.out)
            raise
        finally:
            if pool is not None:
                pool.terminate()
                pool.join()
    report.elapsed = timer.elapsed
    _flush(report, cfg.out)
    return report
