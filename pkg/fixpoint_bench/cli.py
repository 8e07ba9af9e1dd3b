"""Command line interface of the benchmark."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

from .config import RunConfig
from .const import EXIT_OK
from .coordinator import run_experiment
from .diagnostics import bound_report
from .exceptions import BenchError, IntegrityError
from .output import write_outputs
from .presets import CONSTANT_STEP_ALGORITHMS, DIMINISHING_STEP_ALGORITHMS


_LOGGER = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser."""
    parser = argparse.ArgumentParser(
        prog="fixpoint-bench",
        description="Riemannian stochastic fixed point benchmark.",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Enable debug logging."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run an experiment.")
    run.add_argument("--config", required=True, help="Path to the JSON config.")
    run.add_argument("--out-dir", default=None, help="Output directory.")
    run.add_argument("--seed", type=int, default=None, help="Master seed.")
    run.add_argument(
        "--svg", action="store_true", default=None, help="Write SVG charts."
    )
    run.add_argument(
        "--bounds", action="store_true", default=None,
        help="Record step diagnostics and check the convergence bounds.",
    )
    run.add_argument("--workers", type=int, default=None, help="Worker processes.")

    commands.add_parser("presets", help="List the algorithm presets.")

    validate = commands.add_parser("validate", help="Validate a config file.")
    validate.add_argument("--config", required=True, help="Path to the JSON config.")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = RunConfig.from_file(args.config).with_overrides(
        out_dir=args.out_dir,
        master_seed=args.seed,
        emit_svg=args.svg,
        bound_diagnostics=args.bounds,
        workers=args.workers,
    )
    result = run_experiment(config)
    bounds = None
    if config.bound_diagnostics:
        bounds = bound_report(result.records, config)
    write_outputs(result, config.out_dir, config.emit_svg, bounds)

    for key, points in result.series.items():
        n, d_n, f_n = points[-1]
        print(f"{key:<8} n={n:<6} D_n={d_n:.6e} F_n={f_n:.6f}")

    if bounds is not None and bounds["violations"]:
        raise IntegrityError(
            f"{len(bounds['violations'])} bound violations",
            bounds["violations"],
        )
    return EXIT_OK


def _cmd_presets(args: argparse.Namespace) -> int:
    for description in CONSTANT_STEP_ALGORITHMS + DIMINISHING_STEP_ALGORITHMS:
        alpha = description.alpha.to_dict()
        beta = description.beta.to_dict()
        print(
            f"{description.key:<5} {description.engine:<8} "
            f"alpha={alpha} beta={beta} hat_beta={description.hat_beta} "
            f"bar_beta={description.bar_beta}"
        )
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    config = RunConfig.from_file(args.config)
    print(
        f"valid: {config.case} case, dim {config.dim}, {config.factors} factors, "
        f"{len(config.algorithms)} algorithms"
    )
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "presets": _cmd_presets,
    "validate": _cmd_validate,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line interface and return the exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except BenchError as err:
        _LOGGER.error(str(err))
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
