"""Report file export.

Small helpers to write report frames next to a run's other outputs: Parquet
for downstream analysis and a JSON-lines copy for quick inspection.
"""

from __future__ import annotations

import pathlib

import polars as pl

from pvdb.reporting.render import record_lines


def write_parquet(df: pl.DataFrame, path: str | pathlib.Path) -> pathlib.Path:
    """Write a Polars DataFrame to Parquet.

    Args:
        df (pl.DataFrame): The DataFrame to write.
        path (str | pathlib.Path): Path to the output parquet file.

    Returns:
        pathlib.Path: Path object pointing to the file written.

    Raises:
        ValueError: If `path` is an existing directory.

    """
    p = pathlib.Path(path)
    if p.is_dir():
        raise ValueError(f"Cannot write parquet into a directory: {p}")
    p.parent.mkdir(parents=True, exist_ok=True)
    df.write_parquet(str(p))
    return p


def write_records(df: pl.DataFrame, path: str | pathlib.Path) -> pathlib.Path:
    """Write one sorted-key JSON object per row.

    Args:
        df (pl.DataFrame): The DataFrame to write.
        path (str | pathlib.Path): Output path; a `.jsonl` suffix is added when missing.

    Returns:
        pathlib.Path: Path object pointing to the file written.

    """
    p = pathlib.Path(path)
    if p.suffix.lower() != ".jsonl":
        p = p.with_suffix(".jsonl")
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(record_lines(df.iter_rows(named=True)), encoding="utf-8")
    return p
