"""Application configuration and environment-aware settings.

This module defines a `Settings` class (pydantic `BaseSettings`) holding the
evaluation budgets, parallelism and logging defaults used throughout the
project. Every field may be overridden through a `PVDB_` environment
variable, e.g. `PVDB_THREADS=4`.
"""

from __future__ import annotations

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Top-level pydantic Settings container for pvdb configuration.

    Command-line flags take precedence over these values; the settings are
    the fallback when a flag is not given.
    """

    # Parallelism: None means one worker per core
    threads: int | None = Field(default=None, ge=1)

    # Evaluation budgets
    budget_depth: int = Field(default=1_000_000, ge=1)
    budget_nodes: int = Field(default=500_000_000, ge=1)
    budget_seconds: float | None = Field(default=None, gt=0)

    # Optimizer toggle (the CLI flag --no-optimize overrides it)
    optimize: bool = True

    # Logging / UI
    log_level: str = "INFO"
    log_file: Path | None = None
    enable_progress: bool = True

    model_config = SettingsConfigDict(env_prefix="PVDB_")


settings = Settings()
