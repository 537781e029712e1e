from pathlib import Path
from typing import Optional

REPO_ROOT = Path(__file__).resolve().parents[2]
DATA_DIR = REPO_ROOT / "data"
REPORTS_DIR = DATA_DIR / "reports"

APP_LOG_NAME = "engine.jsonl"
PERFORMANCE_LOG_NAME = "performance.jsonl"
ERROR_LOG_NAME = "error_logs.json"


def prepare_log_dir(log_dir: Optional[Path]) -> Optional[Path]:
    """Create the configured log directory; return None when logging to disk is off."""
    if log_dir is None:
        return None
    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    return log_dir


def prepare_reports_dir(reports_dir: Path = REPORTS_DIR) -> Path:
    """Ensure the sweep report directory exists."""
    reports_dir.mkdir(parents=True, exist_ok=True)
    return reports_dir
