"""Logging utilities to configure the project's logger.

This module configures the global `loguru` logger for stderr and optional
rotating-file output. Nothing is ever logged to stdout: command output on
stdout has to stay byte-identical between runs.
"""

from __future__ import annotations

import sys
from pathlib import Path

from loguru import logger

from pvdb.config import settings


def configure_logging(level: str | None = None, log_file: Path | None = None) -> None:
    """Configure the global Loguru logger for stderr and rotating-file output.

    Args:
        level (str | None): Minimum stderr level; defaults to `settings.log_level`.
        log_file (Path | None): Optional debug log file; defaults to `settings.log_file`.

    """
    logger.remove()
    logger.add(
        sys.stderr,
        level=(level or settings.log_level).upper(),
        format="<level>{level: <8}</level> {message}",
        backtrace=False,
        diagnose=False,
    )

    log_file = log_file or settings.log_file
    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.add(str(log_file), rotation="10 MB", retention="14 days", level="DEBUG")
