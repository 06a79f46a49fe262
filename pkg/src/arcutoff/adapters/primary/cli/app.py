"""Command-line application: argument parsing and handler wiring."""

import argparse
import math
import sys
from typing import Callable, Dict, List, Optional, TextIO

from ....application import (
    AlphaHandler,
    ProfileHandler,
    SimulateHandler,
    TVBoundsHandler,
    TVCurveHandler,
    VerifyHandler,
)
from ....application.base import EXIT_FAILED, EXIT_INVALID, BaseHandler
from ....domain.errors import ArcutoffError, ConvergenceError
from ....infrastructure.config import ExperimentConfig, set_config
from ....infrastructure.logging import get_logger, setup_logging
from ....infrastructure.metrics import initialize_metrics, timed_command, write_metrics
from ...secondary.chart.svg_chart import SvgChartRenderer
from ...secondary.persistence.file_adapter import FileResultSink

logger = get_logger(__name__)


def _curve_handler(sink: FileResultSink) -> TVCurveHandler:
    return TVCurveHandler(sink, SvgChartRenderer())


HANDLERS: Dict[str, Callable[..., BaseHandler]] = {
    "estimate-alpha": AlphaHandler,
    "simulate": SimulateHandler,
    "tv-curve": _curve_handler,
    "tv-bounds": TVBoundsHandler,
    "cutoff-profile": ProfileHandler,
    "verify": VerifyHandler,
}

HELP = {
    "estimate-alpha": "estimate the cutoff constant alpha from the sphere walk",
    "simulate": "write a forward trajectory and stationary draws",
    "tv-curve": "total variation curves, one per n, with an SVG chart",
    "tv-bounds": "lower/upper TV brackets over a k range",
    "cutoff-profile": "tv at k(n, beta) over an (n, beta) grid",
    "verify": "run the property suite",
}

# CLI flag -> ExperimentConfig field
OVERRIDES = {
    "seed": "seed",
    "threads": "threads",
    "replicas": "replicas",
    "k_min": "k_min",
    "k_max": "k_max",
    "ln_n": "ln_n_list",
    "beta": "beta_grid",
    "n_steps": "n_steps",
    "burn_in": "burn_in",
    "samples": "samples",
    "k_extra": "k_extra",
    "alpha": "alpha",
}


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="model or run file (JSON)")
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed (required)")
    common.add_argument("--out", help="output directory (created if absent)")
    common.add_argument("--threads", type=int, help="worker threads; results do not depend on it")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING, ERROR")
    common.add_argument("--metrics-file", help="write Prometheus metrics here on exit")
    common.add_argument("--replicas", type=int)
    common.add_argument("--k-min", type=int)
    common.add_argument("--k-max", type=int)
    common.add_argument("--ln-n", type=float, nargs="+", help="values of ln n")
    common.add_argument("--n", type=float, nargs="+", help="values of n (converted to ln n)")
    common.add_argument("--beta", type=float, nargs="+", help="beta grid")
    common.add_argument("--n-steps", type=int, help="sphere-walk steps after burn-in")
    common.add_argument("--burn-in", type=int)
    common.add_argument("--samples", type=int, help="stationarity self-test sample count")
    common.add_argument("--k-extra", type=int, help="forward steps in the self test")
    common.add_argument("--alpha", type=float, help="use this alpha instead of resolving one")
    common.add_argument("--random-scan", action="store_true",
                        help="override the model's scan with uniform random selection")
    common.add_argument("--negative-control", action="store_true",
                        help="perturb the forward kernel in the stationarity check")
    return common


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arcutoff",
        description="Cutoff analysis for auto-regressive coordinate-update chains",
    )
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Run file first, then environment defaults, then command-line flags."""
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig.from_env()
    if args.n:
        args.ln_n = [math.log(n) if n > 0 else float("nan") for n in args.n]
    config.apply({field: getattr(args, flag) for flag, field in OVERRIDES.items()
                  if getattr(args, flag) is not None})
    if args.out:
        config.out_dir = args.out
    if args.log_level:
        config.log_level = args.log_level
    config.metrics_file = args.metrics_file
    config.random_scan = args.random_scan
    config.negative_control = args.negative_control
    config.validate()
    return config


def run(argv: Optional[List[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    """Parse, run one command and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = create_parser().parse_args(argv)
    setup_logging(args.log_level or "WARNING", stream=stderr)
    if args.metrics_file:
        initialize_metrics()
    try:
        with timed_command(args.command) as state:
            try:
                config = build_config(args)
                set_config(config)
                handler = HANDLERS[args.command](FileResultSink(str(config.prepare_out_dir())))
                result = handler.run(config)
            except ConvergenceError as exc:
                state["status"] = "failed"
                print(f"error: {exc}", file=stderr)
                return EXIT_FAILED
            except ArcutoffError as exc:
                state["status"] = "invalid"
                print(f"error: {exc}", file=stderr)
                return EXIT_INVALID
            if result.exit_code == EXIT_FAILED:
                state["status"] = "failed"
                print(result.message, file=stderr)
            print(result.message, file=stdout)
            return result.exit_code
    finally:
        if args.metrics_file:
            write_metrics(args.metrics_file)
