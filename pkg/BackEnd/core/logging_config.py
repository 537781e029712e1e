"""
Structured logging for the thin-position engine.

Console output goes to stderr so that command payloads on stdout stay
machine-readable. When a log directory is configured, every record is also
written as one JSON object per line, and ``@timed`` operations append their
durations to a separate performance log.
"""

import json
import logging
import sys
import time
from datetime import datetime, timezone
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Optional, TypeVar

from BackEnd.core.config import get_config
from BackEnd.core.paths import APP_LOG_NAME, PERFORMANCE_LOG_NAME, prepare_log_dir

ROOT_LOGGER_NAME = "thinpos"
CONSOLE_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"

F = TypeVar("F", bound=Callable[..., Any])

# attributes every LogRecord carries; anything else arrived through ``extra``
_STANDARD_FIELDS = frozenset(vars(logging.makeLogRecord({}))) | {"message", "asctime", "context"}


def _utc(seconds: Optional[float] = None) -> str:
    if seconds is None:
        return datetime.now(timezone.utc).isoformat()
    return datetime.fromtimestamp(seconds, tz=timezone.utc).isoformat()


class StructuredLogFormatter(logging.Formatter):
    """One JSON object per record; ``context`` and any other ``extra`` keys are merged."""

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "timestamp": _utc(record.created),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "source": f"{record.module}:{record.funcName}:{record.lineno}",
        }
        context = dict(getattr(record, "context", None) or {})
        context.update(
            (key, value) for key, value in vars(record).items() if key not in _STANDARD_FIELDS
        )
        if context:
            payload["context"] = context
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str, sort_keys=True)


def _log_dir() -> Optional[Path]:
    return prepare_log_dir(get_config().log_dir)


def _console_handler(level: int) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(CONSOLE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
    return handler


def _json_handler(log_dir: Path) -> logging.Handler:
    handler = logging.FileHandler(log_dir / APP_LOG_NAME, mode="a", encoding="utf-8")
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(StructuredLogFormatter())
    return handler


def setup_logger(name: str, level: Optional[int] = None) -> logging.Logger:
    """Attach the console handler and, with a log directory, the JSON-lines handler."""
    logger = logging.getLogger(name)
    logger.propagate = False
    if logger.handlers:
        return logger

    console_level = get_config().log_level if level is None else level
    log_dir = _log_dir()
    logger.addHandler(_console_handler(console_level))
    if log_dir is not None:
        logger.addHandler(_json_handler(log_dir))
    logger.setLevel(logging.DEBUG if log_dir is not None else console_level)
    return logger


def get_logger(name: str) -> logging.Logger:
    """``get_logger("oracle")`` is the ``thinpos.oracle`` logger."""
    prefix = ROOT_LOGGER_NAME + "."
    if name != ROOT_LOGGER_NAME and not name.startswith(prefix):
        name = prefix + name
    return setup_logger(name)


def log_structured(
    level: str, message: str, context: Optional[dict] = None, logger_name: str = ROOT_LOGGER_NAME
) -> None:
    """Emit ``message`` with a ``context`` dict that the JSON handler keeps as a field."""
    numeric = logging.getLevelName(level.upper())
    get_logger(logger_name).log(
        numeric if isinstance(numeric, int) else logging.INFO,
        message,
        extra={"context": context or {}},
    )


def log_performance(
    operation: str, duration_ms: float, success: bool = True, metadata: Optional[dict] = None
) -> None:
    """Report a timing at DEBUG; append it to the performance log when one is configured."""
    perf_logger = get_logger("performance")
    perf_logger.debug("%s took %.1f ms", operation, duration_ms)

    log_dir = _log_dir()
    if log_dir is None:
        return
    record = {
        "timestamp": _utc(),
        "operation": operation,
        "duration_ms": round(duration_ms, 3),
        "success": success,
        "metadata": metadata or {},
    }
    try:
        with (log_dir / PERFORMANCE_LOG_NAME).open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, default=str, sort_keys=True) + "\n")
    except OSError as e:
        perf_logger.error("Could not append to %s: %s", PERFORMANCE_LOG_NAME, e)


def _size_of(args: tuple) -> dict:
    # first positional argument is the complex for every engine operation
    size = getattr(args[0], "size", None) if args else None
    return {"bricks": size} if isinstance(size, int) else {}


def timed(operation_name: str) -> Callable[[F], F]:
    """Time the wrapped operation and record its outcome with ``log_performance``."""

    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args, **kwargs):
            started = time.perf_counter()
            metadata = _size_of(args)
            success = False
            try:
                result = func(*args, **kwargs)
                success = True
                return result
            except Exception as e:
                metadata["error"] = str(e)
                raise
            finally:
                elapsed = (time.perf_counter() - started) * 1000
                log_performance(operation_name, elapsed, success=success, metadata=metadata)

        return wrapper  # type: ignore[return-value]

    return decorator
