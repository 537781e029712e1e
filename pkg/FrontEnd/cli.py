"""Command-line entry point.

``execute(argv)`` is the testable core: it never prints and never exits.
``main()`` writes the payload to stdout as sorted JSON, diagnostics to
stderr, and returns the exit code (0 success, 1 domain or file error,
2 usage error).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from BackEnd import __version__
from BackEnd.core.config import reset_config
from BackEnd.core.logging_config import get_logger
from BackEnd.models.errors import EngineError
from BackEnd.utils.io import dumps
from FrontEnd.commands import register
from FrontEnd.utils.error_handler import describe_error, log_error

logger = get_logger("cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad command line."""


class _EarlyExit(Exception):
    """--help or --version was handled by argparse."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")

    def exit(self, status: int = 0, message: Optional[str] = None) -> None:  # type: ignore[override]
        if status:
            raise UsageError(message or f"{self.prog}: exit status {status}")
        raise _EarlyExit(message)


@dataclass
class CommandResult:
    exit_code: int
    payload: Any = None
    diagnostics: list[str] = field(default_factory=list)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thinpos", description="Thin position for weighted brick complexes")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    subparsers.required = True
    register(subparsers)
    return parser


def execute(argv: Sequence[str]) -> CommandResult:
    reset_config()
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as e:
        return CommandResult(EXIT_USAGE, None, [str(e)])
    except _EarlyExit:
        return CommandResult(EXIT_OK, None, [])

    try:
        payload = args.handler(args)
    except EngineError as e:
        log_error(e, context=args.command, details={"argv": list(argv)})
        logger.debug("%s failed: %s", args.command, e)
        return CommandResult(EXIT_ERROR, None, describe_error(e))
    except OSError as e:
        log_error(e, context=args.command, details={"argv": list(argv)})
        return CommandResult(EXIT_ERROR, None, [f"error: {e}"])
    return CommandResult(EXIT_OK, payload, [])


def main(argv: Optional[Sequence[str]] = None) -> int:
    result = execute(sys.argv[1:] if argv is None else argv)
    for line in result.diagnostics:
        print(line, file=sys.stderr)
    if result.payload is not None:
        sys.stdout.write(dumps(result.payload) + "\n")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
