"""Main module."""

from __future__ import annotations

import logging
import sys
from collections.abc import Sequence

from src.api.cli import build_parser
from src.api.commands.common import resolve_config
from src.api.di import create_base_injector
from src.app.domain.errors import TinyMyoError

logger = logging.getLogger(__name__)

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def configure_logging(verbosity: int) -> None:
    logging.basicConfig(
        level=LOG_LEVELS.get(verbosity, logging.DEBUG),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run one subcommand, and map errors to exit codes.

    Args:
        argv: Arguments without the program name; ``sys.argv[1:]`` when None.

    Returns:
        Process exit code: 0 ok, 2 I/O, 3 validation, 4 mismatch, 5 numeric.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        injector = create_base_injector(resolve_config(args))
        return args.handler(args, injector)
    except TinyMyoError as exc:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
