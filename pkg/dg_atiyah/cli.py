"""Command-line interface for the DG Atiyah engine."""

import argparse
import sys
from pathlib import Path
from typing import NoReturn, Optional

from .commands import OPERATOR_CHOICES, ROUTES, RunOptions
from .config import REPORT_FORMATS, EngineConfig, load_config
from .errors import EXIT_USAGE


class UsageExitParser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage code instead of 2 (2 is a verdict)."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive(text: str) -> int:
    value = _non_negative(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _common(sub: argparse.ArgumentParser):
    sub.add_argument(
        "--format",
        choices=REPORT_FORMATS,
        help="Report format (default: from config, else text)",
    )
    sub.add_argument(
        "--config",
        type=Path,
        help="Path to atiyah_config.yaml",
    )
    sub.add_argument(
        "--workers",
        type=_positive,
        help="Threads for jet scans and chart checks (default: 1)",
    )
    sub.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress to stderr (-v info, -vv debug)",
    )


def _bounds(sub: argparse.ArgumentParser):
    sub.add_argument(
        "--degree-bound",
        type=_non_negative,
        help="Highest certificate degree to search (default: 2*maxdeg(s)+2)",
    )
    sub.add_argument(
        "--jet-order",
        type=_non_negative,
        help="Highest jet order tested at each zero point (default: 4)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = UsageExitParser(
        prog="dg_atiyah",
        description="DG Atiyah -- exact Atiyah-class and clean-intersection engine for amplitude +1 DG manifolds.",
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    decide = commands.add_parser("decide", help="Decide whether the Atiyah class vanishes")
    decide.add_argument("file", type=Path, help="Problem file (.yaml, .yml or .json)")
    _bounds(decide)
    _common(decide)

    cocycle = commands.add_parser("cocycle", help="Print the Atiyah cocycle")
    cocycle.add_argument("file", type=Path, help="Problem file")
    cocycle.add_argument(
        "--route",
        choices=ROUTES,
        default="closed",
        help="closed: covariant-derivative formula; definitional: graded brackets (default: closed)",
    )
    cocycle.add_argument(
        "--check-both",
        action="store_true",
        help="Also compute the other route and report whether they agree",
    )
    _common(cocycle)

    operators = commands.add_parser("operators", help="Print the coboundary matrices d1, d2, d3")
    operators.add_argument("file", type=Path, help="Problem file")
    operators.add_argument(
        "--which",
        choices=OPERATOR_CHOICES,
        default="all",
        help="Matrix to print (default: all)",
    )
    _common(operators)

    clean = commands.add_parser("clean", help="Run the clean-intersection oracle")
    clean.add_argument("file", type=Path, help="Problem file")
    _common(clean)

    verify = commands.add_parser("verify", help="Run every applicable invariant check")
    verify.add_argument("file", type=Path, nargs="?", help="Problem file")
    verify.add_argument(
        "--corpus",
        type=Path,
        help="Verify every problem file under this directory and print a table",
    )
    _bounds(verify)
    _common(verify)
    return parser


def parse_args(argv: Optional[list[str]] = None) -> tuple[EngineConfig, RunOptions, argparse.Namespace]:
    """Parse CLI args and return (config, options, args)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and (args.file is None) == (args.corpus is None):
        parser.error("verify needs exactly one of FILE or --corpus DIR")

    config = load_config(
        config_path=args.config,
        format=args.format,
        workers=args.workers,
    )
    options = RunOptions(
        degree_bound=getattr(args, "degree_bound", None),
        jet_order=getattr(args, "jet_order", None),
        route=getattr(args, "route", "closed"),
        check_both=getattr(args, "check_both", False),
        which=getattr(args, "which", "all"),
    )
    return config, options, args
