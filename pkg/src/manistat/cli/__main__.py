"""Command-line front end of manistat.

    manistat test first-order data.csv --manifold sphere --seed 7
    manistat test second-order data.csv --blocks 1,8,15,22,30 --block-n 8
    manistat simulate --model M1 --tau 0.5 --T 500 --out m1.csv
    manistat experiment --experiment Table1 --replicates 500 --out results/table1

Every failure prints one line `error=<code> exit=<exit code> reason=<text>` to
stderr and returns the exit code of its error class.
"""

import argparse
import pathlib
import sys
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from manistat.cli.config import ExperimentConfig, load_config_file
from manistat.cli.experiment import output_paths, run_experiment
from manistat.cli.ingest import write_series
from manistat.cli.runners import run_first_order, run_second_order, write_report
from manistat.exceptions import InvalidInputError, ManistatError
from manistat.first_order import FirstOrderConfig
from manistat.second_order import SecondOrderConfig
from manistat.simulate import SimModel, SimSpec, simulate
from manistat.utils import get_logger

logger = get_logger(__name__)

INTERRUPTED = 130


def _int_list(text: str) -> list[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("path", type=pathlib.Path, help="CSV dataset")
    parser.add_argument(
        "--manifold", choices=["sphere", "spd", "euclidean"], default=None
    )
    parser.add_argument("--ambient-dim", type=int, default=None)
    parser.add_argument(
        "--compositional",
        action="store_true",
        help="rows are proportions; apply the square-root transform",
    )
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--out", type=pathlib.Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manistat",
        description="Stationarity tests for manifold-valued time series",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    test = commands.add_parser("test", help="run a test on a dataset")
    tests = test.add_subparsers(dest="test", required=True)

    first = tests.add_parser("first-order", help="constant intrinsic mean")
    _add_input_flags(first)
    first.add_argument("--method", choices=["camb", "b1", "b2"], default=None)
    first.add_argument("--bootstrap-b", type=int, default=None)
    first.add_argument("--block-n", type=int, default=None)
    first.add_argument("--seed", type=int, default=None)

    second = tests.add_parser("second-order", help="time-invariant local spectrum")
    _add_input_flags(second)
    second.add_argument("--block-n", type=int, default=None)
    second.add_argument(
        "--blocks",
        type=_int_list,
        default=None,
        help="comma-separated 1-based block starts",
    )
    second.add_argument(
        "--detrend", choices=["none", "block-frechet"], default=None
    )
    second.add_argument("--bandwidth", type=int, default=None)

    sim = commands.add_parser("simulate", help="write a simulated series")
    sim.add_argument(
        "--model", choices=[m.value for m in SimModel], required=True
    )
    sim.add_argument("--tau", type=float, default=0.0)
    sim.add_argument("--T", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--burn-in", type=int, default=50)
    sim.add_argument("--out", type=pathlib.Path, required=True)

    exp = commands.add_parser("experiment", help="Monte Carlo rejection rates")
    exp.add_argument("--config", type=pathlib.Path, default=None)
    exp.add_argument(
        "--experiment",
        choices=["Table1", "Table2", "PowerFirst", "PowerSecond"],
        default=None,
    )
    exp.add_argument("--replicates", type=int, default=None)
    exp.add_argument("--T", dest="T_values", default=None, help="comma-separated")
    exp.add_argument("--tau", dest="taus", default=None, help="comma-separated")
    exp.add_argument("--model", dest="models", default=None, help="comma-separated")
    exp.add_argument("--method", dest="methods", default=None, help="comma-separated")
    exp.add_argument("--bootstrap-b", dest="bootstrap_B", type=int, default=None)
    exp.add_argument(
        "--block-n",
        dest="block_policy",
        default=None,
        help="auto, T/<k> or an integer",
    )
    exp.add_argument("--alpha", type=float, default=None)
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--out", type=pathlib.Path, default=None)
    exp.add_argument("--threads", type=int, default=None)
    return parser


def _given(**values: Any) -> dict[str, Any]:
    return {k: v for k, v in values.items() if v is not None}


def _test_first_order(args: argparse.Namespace) -> None:
    cfg = FirstOrderConfig(
        **_given(
            method=args.method,
            bootstrap_B=args.bootstrap_b,
            block_n=args.block_n,
            seed=args.seed,
            alpha=args.alpha,
        )
    )
    report = run_first_order(
        args.path, cfg, args.manifold, args.ambient_dim, args.compositional
    )
    write_report(report, args.out)


def _test_second_order(args: argparse.Namespace) -> None:
    detrend = args.detrend.replace("-", "_") if args.detrend else None
    if args.blocks and args.block_n is None:
        raise InvalidInputError("--blocks needs --block-n")
    cfg = SecondOrderConfig(
        **_given(
            block_n=args.block_n,
            block_starts=args.blocks,
            alpha=args.alpha,
            detrend=detrend,
            bandwidth=args.bandwidth,
        )
    )
    report = run_second_order(
        args.path, cfg, args.manifold, args.ambient_dim, args.compositional
    )
    write_report(report, args.out)


def _simulate(args: argparse.Namespace) -> None:
    spec = SimSpec(
        model=args.model,
        tau=args.tau,
        T=args.T,
        seed=args.seed,
        burn_in=args.burn_in,
    )
    path = write_series(simulate(spec), args.out)
    logger.info(f"wrote {spec.T} points of {spec.model.value} to {path}")


def _experiment(args: argparse.Namespace) -> None:
    values: dict[str, Any] = load_config_file(args.config)
    values.update(
        _given(
            experiment=args.experiment,
            replicates=args.replicates,
            T_values=args.T_values,
            taus=args.taus,
            models=args.models,
            methods=args.methods,
            bootstrap_B=args.bootstrap_B,
            block_policy=args.block_policy,
            alpha=args.alpha,
            seed=args.seed,
            out=args.out,
            threads=args.threads,
        )
    )
    cfg = ExperimentConfig(**values)
    run_experiment(cfg)
    csv_path, json_path = output_paths(cfg.out)
    logger.info(f"wrote {csv_path} and {json_path}")


def _validation_reason(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "input"
    return f"{location}: {first['msg']} ({error.error_count()} error(s))"


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            _simulate(args)
        elif args.command == "experiment":
            _experiment(args)
        elif args.test == "first-order":
            _test_first_order(args)
        else:
            _test_second_order(args)
    except ManistatError as e:
        print(e.one_line(), file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        error = InvalidInputError(_validation_reason(e))
        print(error.one_line(), file=sys.stderr)
        return error.exit_code
    except KeyboardInterrupt:
        print(
            f"error=interrupted exit={INTERRUPTED} reason=interrupted by user",
            file=sys.stderr,
        )
        return INTERRUPTED
    except Exception as e:
        logger.exception("unexpected failure")
        reason = " ".join(str(e).split()) or type(e).__name__
        print(f"error=internal exit=1 reason={reason}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
