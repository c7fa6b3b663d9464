"""Text rendering of report frames.

Two output modes: `table` renders an ASCII table with rich (no colour,
fixed width, so output is byte-stable), `records` emits one JSON object
per row with sorted keys.
"""

from __future__ import annotations

import io
import json
from collections.abc import Iterable, Mapping
from typing import Any, Literal

import polars as pl
from rich import box
from rich.console import Console
from rich.table import Table

from pvdb.dataset.reports import add_total

type OutputFormat = Literal["table", "records"]

TABLE_WIDTH = 120


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.1f}"
    return str(value)


def table_text(frame: pl.DataFrame, *, title: str | None = None) -> str:
    """ASCII table of `frame`; numeric columns are right-aligned."""
    table = Table(title=title, box=box.ASCII, title_justify="left")
    for name, dtype in frame.schema.items():
        table.add_column(name, justify="right" if dtype.is_numeric() else "left")
    for row in frame.iter_rows():
        table.add_row(*(_cell(v) for v in row))
    buffer = io.StringIO()
    console = Console(
        file=buffer, width=TABLE_WIDTH, color_system=None, force_terminal=False, highlight=False
    )
    console.print(table)
    return buffer.getvalue()


def record_lines(rows: Iterable[Mapping[str, Any]]) -> str:
    """One sorted-key JSON object per line."""
    return "".join(json.dumps(dict(row), sort_keys=True, ensure_ascii=False) + "\n" for row in rows)


def render_frame(
    frame: pl.DataFrame,
    fmt: OutputFormat = "table",
    *,
    title: str | None = None,
    total: bool = False,
) -> str:
    """Render `frame` in the requested mode, optionally with a Total row."""
    if total:
        frame = add_total(frame)
    if fmt == "records":
        return record_lines(frame.iter_rows(named=True))
    return table_text(frame, title=title)
