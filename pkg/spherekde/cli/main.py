# spherekde/cli/main.py
# Command-line entrypoint. Registers sub-commands and maps errors to exit codes.

import argparse
import logging
import sys

from spherekde import __version__
from spherekde.cli.commands import bench, estimate, select
from spherekde.config import configure_logging
from spherekde.errors import InputFormatError, SphereKDEError

logger = logging.getLogger(__name__)

EXIT_OK = 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spherekde",
        description="Kernel density estimation on the sphere with data-driven bandwidth selection.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="overrides SPHEREKDE_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (select, estimate, bench):
        command.register(subparsers)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors, matching the parse-error code
        return int(e.code or 0)

    try:
        configure_logging(args.log_level)
        return args.handler(args)
    except SphereKDEError as e:
        logger.error("❌ %s", e.detail)
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        logger.error("❌ I/O error: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return InputFormatError.exit_code
