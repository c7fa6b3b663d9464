import pathlib

import pytest
from pydantic import ValidationError

from pvdb.config.settings import Settings


def test_defaults(monkeypatch):
    for name in ("THREADS", "BUDGET_DEPTH", "BUDGET_NODES", "BUDGET_SECONDS", "OPTIMIZE", "LOG_LEVEL"):
        monkeypatch.delenv(f"PVDB_{name}", raising=False)
    s = Settings()
    assert s.threads is None
    assert s.budget_depth == 1_000_000
    assert s.budget_nodes == 500_000_000
    assert s.budget_seconds is None
    assert s.optimize is True
    assert s.log_level == "INFO"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("PVDB_THREADS", "4")
    monkeypatch.setenv("PVDB_OPTIMIZE", "false")
    monkeypatch.setenv("PVDB_BUDGET_SECONDS", "2.5")
    monkeypatch.setenv("PVDB_LOG_FILE", "logs/pvdb.log")
    s = Settings()
    assert s.threads == 4
    assert s.optimize is False
    assert s.budget_seconds == 2.5
    assert s.log_file == pathlib.Path("logs/pvdb.log")


def test_out_of_range_values_are_rejected(monkeypatch):
    monkeypatch.setenv("PVDB_THREADS", "0")
    with pytest.raises(ValidationError):
        Settings()
