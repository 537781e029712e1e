import pytest

from BackEnd.core.config import reset_config

ENGINE_ENV = (
    "THINPOS_BUDGET",
    "THINPOS_PARTITION_CAP",
    "THINPOS_TRUNK_CAP",
    "THINPOS_WIDTH_CAP",
    "THINPOS_BNB_BUDGET",
    "THINPOS_LOG_DIR",
    "THINPOS_LOG_LEVEL",
)


@pytest.fixture(autouse=True)
def isolated_engine_config(monkeypatch):
    """Every test starts from the default caps with logging to disk off."""
    for name in ENGINE_ENV:
        monkeypatch.delenv(name, raising=False)
    reset_config()
    yield
    reset_config()
