"""
Command-line entry point for essrate.

Batch front-end: experiment configs in, CSV/JSON/SVG artifacts out.
"""

import argparse
import logging
import sys

from essrate.cli import commands
from essrate.config import get_settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger(__name__)


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}") from e
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"expected a < b, got {text!r}")
    return lo, hi


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one subcommand per operation.

    Returns:
        The configured parser.
    """
    parser = argparse.ArgumentParser(
        prog="essrate",
        description="Essential convergence rates of rescaled optimizer ODEs under "
        "stability-controlled Runge-Kutta integration.",
    )
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Override ESSRATE_LOG_LEVEL",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Integrate the experiments of a config")
    simulate.add_argument("config", help="Experiment config (JSON)")

    stability = sub.add_parser("stability", help="Sample the stability domain of a method")
    stability.add_argument("method", help="Registered method name, e.g. rk4")
    stability.add_argument("--re", type=_pair, default=(-4.0, 1.0), help="Real range a,b")
    stability.add_argument("--im", type=_pair, default=(-3.5, 3.5), help="Imaginary range a,b")
    stability.add_argument("--res", type=int, default=201, help="Samples per axis")
    stability.add_argument("-o", "--out", required=True, help="Output CSV")
    stability.add_argument("--svg", default=None, help="Optional heat map SVG")

    essential = sub.add_parser("essential-check", help="Check 1-essentiality over a family")
    essential.add_argument("config", help="Experiment config (JSON)")

    theorem = sub.add_parser("theorem-check", help="Check alpha(t_k) <= (r + eps) k")
    theorem.add_argument("config", help="Experiment config (JSON)")
    theorem.add_argument("--eps", type=float, default=None, help="Slack over the domain radius")

    reproduce = sub.add_parser("reproduce-paper", help="Run every reference experiment")
    reproduce.add_argument("-o", "--out", required=True, help="Report directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, configure logging and dispatch to a command.

    Returns:
        The command's exit code.
    """
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return commands.EXIT_CONFIG if e.code else commands.EXIT_OK

    level = args.log_level or get_settings().log_level
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT)
    logger.debug(f"Running {args.command}")

    match args.command:
        case "simulate":
            return commands.cmd_simulate(args.config)
        case "stability":
            return commands.cmd_stability(
                args.method, args.re, args.im, args.res, args.out, svg=args.svg
            )
        case "essential-check":
            return commands.cmd_essential_check(args.config)
        case "theorem-check":
            return commands.cmd_theorem_check(args.config, eps=args.eps)
        case "reproduce-paper":
            return commands.cmd_reproduce_paper(args.out)
    parser.error(f"unknown command {args.command}")
    return commands.EXIT_CONFIG


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
