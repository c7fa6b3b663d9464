"""Per-forge statistics and origin-list comparisons.

Forges are identified by the hostname of an origin url as written, case
included; urls without a parsable hostname are counted under `(unknown)`.
All tables are polars DataFrames with a `host` column; totals are added when rendering.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from urllib.parse import urlsplit

import polars as pl

from pvdb.models.archive import ArchiveGraph
from pvdb.models.fingerprint import OriginList
from pvdb.processing.temporal import restrict_to_timestamp

UNKNOWN_HOST = "(unknown)"
TOTAL_LABEL = "Total"


def host_of(url: str) -> str:
    """Hostname of an origin url as written (case kept), or `(unknown)` when there is none."""
    try:
        parts = urlsplit(url)
    except ValueError:
        return UNKNOWN_HOST
    if not parts.hostname:
        return UNKNOWN_HOST
    # netloc without userinfo and port
    host = parts.netloc.rpartition("@")[2]
    if host.startswith("["):
        return host[1 : host.index("]")]
    return host.partition(":")[0]


def _url_key(url: str) -> bytes:
    return url.encode("utf-8")


def _count_hosts(urls: list[str] | tuple[str, ...], column: str) -> pl.DataFrame:
    frame = pl.DataFrame({"host": [host_of(u) for u in urls]}, schema={"host": pl.String})
    return frame.group_by("host").agg(pl.len().cast(pl.Int64).alias(column))


def forge_stats(origins: OriginList) -> pl.DataFrame:
    """Origins per forge, largest first (ties by hostname).

    Returns:
        pl.DataFrame: Columns `host` and `origins`; the counts sum to `len(origins)`.

    """
    return _count_hosts(origins.urls, "origins").sort(
        ["origins", "host"], descending=[True, False]
    )


def forge_census(archive: ArchiveGraph, t: int) -> pl.DataFrame:
    """Origins per forge in the archive as of `t` (the origin universe of the view)."""
    view = restrict_to_timestamp(archive, t)
    return _count_hosts(tuple(view.origins), "origins").sort(
        ["origins", "host"], descending=[True, False]
    )


def forge_matrix(lists: Mapping[str, OriginList]) -> pl.DataFrame:
    """Per-forge counts of several labelled lists side by side.

    Rows are ordered by the first list's count, then by hostname; a host
    absent from a list counts 0 there.
    """
    labels = list(lists)
    frame = pl.DataFrame(schema={"host": pl.String})
    for label in labels:
        counts = _count_hosts(lists[label].urls, label)
        frame = frame.join(counts, on="host", how="full", coalesce=True)
    if not labels:
        return frame
    frame = frame.with_columns(pl.col(labels).fill_null(0))
    return frame.select(["host", *labels]).sort([labels[0], "host"], descending=[True, False])


def add_total(frame: pl.DataFrame, label: str = TOTAL_LABEL) -> pl.DataFrame:
    """Append a row summing every integer column, labelled in `host`."""
    sums = {
        name: [frame[name].sum() if dtype.is_integer() else None]
        for name, dtype in frame.schema.items()
        if name != "host"
    }
    total = pl.DataFrame({"host": [label], **sums}, schema=frame.schema)
    return pl.concat([frame, total])


@dataclass(frozen=True, slots=True, eq=False)
class DiffReport:
    """Differences between a list `a` and a later or alternative list `b`.

    `precision` is |a ∩ b| / |a| over (url, snapshot) pairs, None when `a`
    is empty. `forges` has per-host `before`, `after`, `delta` and
    `percent` ((after - before) / before × 100, null when before is 0).
    """

    added: tuple[str, ...]
    removed: tuple[str, ...]
    changed: tuple[str, ...]
    precision: float | None
    forges: pl.DataFrame

    @property
    def empty(self) -> bool:
        return not (self.added or self.removed or self.changed)


def forge_delta(before: OriginList, after: OriginList) -> pl.DataFrame:
    frame = forge_matrix({"before": before, "after": after})
    return frame.with_columns(
        (pl.col("after") - pl.col("before")).alias("delta"),
        pl.when(pl.col("before") > 0)
        .then((pl.col("after") - pl.col("before")) / pl.col("before") * 100.0)
        .otherwise(None)
        .cast(pl.Float64)
        .alias("percent"),
    ).sort("host")


def diff_lists(a: OriginList, b: OriginList) -> DiffReport:
    """Compare two origin lists by url and snapshot.

    `diff_lists(b, a)` mirrors `diff_lists(a, b)`: added and removed swap.
    """
    before, after = a.as_mapping(), b.as_mapping()
    added = tuple(sorted(after.keys() - before.keys(), key=_url_key))
    removed = tuple(sorted(before.keys() - after.keys(), key=_url_key))
    changed = tuple(
        sorted((u for u in before.keys() & after.keys() if before[u] != after[u]), key=_url_key)
    )
    kept = len(set(a.entries) & set(b.entries))
    precision = kept / len(a) if len(a) else None
    return DiffReport(added, removed, changed, precision, forge_delta(a, b))
