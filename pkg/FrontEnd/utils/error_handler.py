"""Diagnostics for failed commands and the optional persisted error log.

``describe_error`` renders the lines printed on stderr. ``log_error`` turns a
failure into a JSON entry and, when ``THINPOS_LOG_DIR`` is set, appends it to
``error_logs.json`` there (newest last, capped at ``MAX_ENTRIES``).
"""

from __future__ import annotations

import json
import logging
import os
import platform
import sys
import tempfile
import threading
import traceback
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

from BackEnd.core.config import get_config
from BackEnd.core.paths import ERROR_LOG_NAME, prepare_log_dir
from BackEnd.models.errors import EngineError

MAX_ENTRIES = 200

_write_lock = threading.Lock()


def _plain(value: Any) -> Any:
    """Brick and facet ids are tuples and frozensets; JSON wants lists and strings."""
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_plain(item) for item in value]
    return str(value)


def error_log_file(log_dir: Optional[Path] = None) -> Optional[Path]:
    """Where error entries go, or None when no log directory is configured."""
    directory = prepare_log_dir(log_dir if log_dir is not None else get_config().log_dir)
    return None if directory is None else directory / ERROR_LOG_NAME


def describe_error(error: BaseException) -> list[str]:
    """Human-readable diagnostic lines for standard error."""
    if not isinstance(error, EngineError):
        return [f"error: {type(error).__name__}: {error}"]
    where = f" [{error.context}]" if error.context else ""
    lines = [f"error{where}: {error.message}"]
    lines.extend(
        f"  {key}: {json.dumps(_plain(error.details[key]), sort_keys=True)}"
        for key in sorted(error.details)
    )
    return lines


def _current_traceback() -> str:
    if sys.exc_info()[0] is None:
        return ""
    return traceback.format_exc()


def _build_entry(error: Any, context: str, details: dict[str, Any]) -> dict[str, Any]:
    merged = dict(details)
    if isinstance(error, EngineError):
        merged.setdefault("operation", error.context)
        for key, value in error.details.items():
            merged.setdefault(key, value)
    return {
        "timestamp": datetime.now().isoformat(timespec="seconds"),
        "context": context,
        "error": str(error),
        "error_type": type(error).__name__,
        "traceback": _current_traceback(),
        "details": _plain(merged),
        "environment": {
            "python": platform.python_version(),
            "platform": platform.platform(),
            "argv0": sys.argv[0] if sys.argv else "",
        },
    }


def _read_entries(target: Path) -> list[dict[str, Any]]:
    try:
        entries = json.loads(target.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        return []
    return entries if isinstance(entries, list) else []


def _replace_entries(target: Path, entries: list[dict[str, Any]]) -> None:
    fd, scratch = tempfile.mkstemp(dir=target.parent, prefix=".errors-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            json.dump(entries, handle, indent=2, ensure_ascii=False)
        os.replace(scratch, target)
    except BaseException:
        Path(scratch).unlink(missing_ok=True)
        raise


def log_error(
    error: Any,
    context: str = "thinpos",
    details: Optional[dict[str, Any]] = None,
    log_dir: Optional[Path] = None,
) -> Optional[dict[str, Any]]:
    """Build a structured error entry; persist it when a log directory is configured.

    Returns the entry (with ``log_file`` set when it was written), or None if
    even building it failed. Logging an error never raises.
    """
    try:
        entry = _build_entry(error, context, details or {})
        target = error_log_file(log_dir)
        if target is None:
            return entry
        with _write_lock:
            entries = _read_entries(target) + [entry]
            _replace_entries(target, entries[-MAX_ENTRIES:])
        entry["log_file"] = str(target)
        return entry
    except Exception as exc:
        logging.getLogger(__name__).error("Could not record error: %s", exc)
        return None


def get_logs(log_dir: Optional[Path] = None) -> list[dict[str, Any]]:
    """Persisted entries, oldest first; empty when logging to disk is off."""
    target = error_log_file(log_dir)
    if target is None or not target.exists():
        return []
    return _read_entries(target)
