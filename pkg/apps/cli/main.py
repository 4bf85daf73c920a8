"""
nsl: spectral stability verdicts for constant states of nonlocal
reaction-diffusion equations.

Exit codes: 0 stable / match, 10 unstable, 11 simulation-classifier mismatch,
2 usage or configuration error, 3 domain error, 1 unexpected failure.
"""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from apps.cli.commands import classify, oracle, roots, scan, simulate, verify
from apps.cli.commands.common import EXIT_DOMAIN, EXIT_UNEXPECTED, EXIT_USAGE
from apps.errors import (
    ArgumentError,
    BracketError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    FitError,
    PreconditionError,
)
from apps.settings import get_settings

logger = logging.getLogger(__name__)

USAGE_ERRORS = (ArgumentError, ConfigurationError, ValidationError, FileNotFoundError)
DOMAIN_ERRORS = (DomainError, BracketError, PreconditionError, ConvergenceError, FitError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsl",
        description="Spectral stability of constant states of nonlocal reaction-diffusion equations",
        allow_abbrev=False,
    )
    parser.add_argument("--log-level", help="overrides NSL_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Register commands
    classify.register(subparsers)
    roots.register(subparsers)
    oracle.register(subparsers)
    scan.register(subparsers)
    simulate.register(subparsers)
    verify.register(subparsers)
    return parser


def configure_logging(level: Optional[str]) -> None:
    level = (level or get_settings().log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    try:
        return args.handler(args)
    except USAGE_ERRORS as exc:
        print(f"nsl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DOMAIN_ERRORS as exc:
        print(f"nsl {args.command}: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as exc:
        logger.error(f"Unexpected failure in {args.command}: {exc}", exc_info=True)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
