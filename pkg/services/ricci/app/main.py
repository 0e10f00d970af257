"""
Command-line entry point: python -m services.ricci.app.main <command> ...

Exit codes: 0 ok, 2 usage, 3 curvature failure, 4 missing field,
5 disconnected graph.
"""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from . import config
from .commands import bench, curvature, diagnose, gen, replay, rewire, sweep
from .errors import RicciError, UsageError

logger = logging.getLogger(__name__)

COMMANDS = (gen, curvature, rewire, diagnose, bench, sweep, replay)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meshricci",
        description="Curvature diagnostics and physics-informed rewiring for simulation mesh graphs",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def configure_logging(verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad flags and 0 on --help
        return int(e.code or 0)

    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except ValidationError as e:
        error: RicciError = UsageError(str(e).splitlines()[0])
    except RicciError as e:
        error = e
    logger.debug("command %s failed", args.command, exc_info=True)
    print(f"error: {error}", file=sys.stderr)
    return error.exit_code


if __name__ == "__main__":
    sys.exit(main())
