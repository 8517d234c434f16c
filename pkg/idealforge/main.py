import argparse
import sys
from typing import Optional, Sequence

from idealforge import __version__
from idealforge.commands import bench, bounds, build, emit, oracle, verify
from idealforge.commands.common import EXIT_USAGE
from idealforge.core.config import settings
from idealforge.core.logging import configure_logging


class _Parser(argparse.ArgumentParser):
    # Usage errors exit 1; 2 is reserved for count mismatches.
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def create_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="idealforge",
        description="Build monotone DNF/CNF formulas with exactly k satisfying assignments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help=f"logging level (default {settings.log_level})")
    parser.add_argument("-v", "--verbose", action="store_true", help="shorthand for --log-level INFO")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (build, verify, bounds, emit, oracle, bench):
        command.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    # Counts in the millions of digits are printed in decimal.
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)

    args = create_parser().parse_args(argv)
    level = args.log_level or ("INFO" if args.verbose else settings.log_level)
    configure_logging(level)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
