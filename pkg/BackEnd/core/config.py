"""
Engine configuration.

Caps and budgets for the exponential searches live here. Values come from the
environment (optionally seeded from a ``.env`` file) and fall back to the
defaults below:

- THINPOS_BUDGET: orderings visited by plateau/certificate searches
- THINPOS_PARTITION_CAP: dual-graph components enumerated for instability
- THINPOS_TRUNK_CAP: bricks accepted by the subset-lattice trunk DP
- THINPOS_WIDTH_CAP: bricks accepted by exhaustive width enumeration
- THINPOS_BNB_BUDGET: nodes expanded by branch-and-bound width search
- THINPOS_LOG_DIR: directory for JSON logs (disabled when unset)
- THINPOS_LOG_LEVEL: console log level
"""

import logging
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

DEFAULT_SEARCH_BUDGET = 1_000_000
DEFAULT_PARTITION_CAP = 20
DEFAULT_TRUNK_CAP = 22
DEFAULT_WIDTH_CAP = 9
DEFAULT_BNB_BUDGET = 2_000_000


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not str(raw).strip():
        return default
    try:
        value = int(str(raw).strip())
    except ValueError:
        logging.getLogger(__name__).warning("Ignoring non-integer %s=%r", name, raw)
        return default
    return value if value > 0 else default


def _env_level(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None:
        return default
    level = logging.getLevelName(str(raw).strip().upper())
    return level if isinstance(level, int) else default


@dataclass(frozen=True)
class EngineConfig:
    """Search caps shared by every engine operation."""

    search_budget: int = DEFAULT_SEARCH_BUDGET
    partition_component_cap: int = DEFAULT_PARTITION_CAP
    trunk_brick_cap: int = DEFAULT_TRUNK_CAP
    width_exhaustive_cap: int = DEFAULT_WIDTH_CAP
    bnb_node_budget: int = DEFAULT_BNB_BUDGET
    log_dir: Optional[Path] = None
    log_level: int = logging.WARNING

    @classmethod
    def from_env(cls, dotenv: bool = True) -> "EngineConfig":
        if dotenv:
            load_dotenv(override=False)
        log_dir = os.getenv("THINPOS_LOG_DIR")
        return cls(
            search_budget=_env_int("THINPOS_BUDGET", DEFAULT_SEARCH_BUDGET),
            partition_component_cap=_env_int("THINPOS_PARTITION_CAP", DEFAULT_PARTITION_CAP),
            trunk_brick_cap=_env_int("THINPOS_TRUNK_CAP", DEFAULT_TRUNK_CAP),
            width_exhaustive_cap=_env_int("THINPOS_WIDTH_CAP", DEFAULT_WIDTH_CAP),
            bnb_node_budget=_env_int("THINPOS_BNB_BUDGET", DEFAULT_BNB_BUDGET),
            log_dir=Path(log_dir) if log_dir else None,
            log_level=_env_level("THINPOS_LOG_LEVEL", logging.WARNING),
        )


@lru_cache(maxsize=1)
def get_config() -> EngineConfig:
    """Process-wide configuration, read once."""
    return EngineConfig.from_env()


def reset_config() -> None:
    """Forget the cached configuration (tests and the CLI re-read the environment)."""
    get_config.cache_clear()
