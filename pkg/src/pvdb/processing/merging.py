"""Append-only merging of archive exports.

Archives are values: an update is a merge producing a new archive. Merging
unions node stores and visit histories, refusing anything that would
rewrite history, i.e. two records for one Swhid, or a visit slipped in
before an origin's already-archived visits.
"""

from __future__ import annotations

from loguru import logger

from pvdb.errors import AppendOnlyViolationError, IntegrityConflictError
from pvdb.models.archive import ArchiveGraph, Node, Origin, OriginVisit, Swhid

log = logger.bind(component="merging")


def _merge_visits(url: str, base: Origin | None, delta: Origin | None) -> Origin:
    """Union the visit histories of one origin, keeping base's history as a prefix.

    Raises:
        AppendOnlyViolationError: If a shared timestamp has two snapshots or
            delta inserts a visit before base's last visit.

    """
    if base is None or delta is None:
        only = base or delta
        assert only is not None
        return only

    by_ts: dict[int, OriginVisit] = {v.timestamp: v for v in base.visits}
    for visit in delta.visits:
        known = by_ts.get(visit.timestamp)
        if known is not None and known.snapshot != visit.snapshot:
            raise AppendOnlyViolationError(
                url,
                f"visit at {visit.timestamp} has snapshot {known.snapshot} in base "
                f"but {visit.snapshot} in delta",
            )
        by_ts.setdefault(visit.timestamp, visit)

    merged = tuple(by_ts[ts] for ts in sorted(by_ts))
    if merged[: len(base.visits)] != base.visits:
        first_new = next(v for v, b in zip(merged, base.visits, strict=False) if v != b)
        raise AppendOnlyViolationError(
            url, f"delta inserts a visit at {first_new.timestamp} into archived history"
        )
    return Origin(url, merged)


def merge_append_only(base: ArchiveGraph, delta: ArchiveGraph) -> ArchiveGraph:
    """Merge `delta` into `base`, producing a new archive.

    Args:
        base (ArchiveGraph): The earlier (or reference) archive.
        delta (ArchiveGraph): Archive holding the additions.

    Returns:
        ArchiveGraph: All nodes, origins and visits of both, with export
            timestamp the later of the two.

    Raises:
        IntegrityConflictError: Both archives hold different records for one Swhid.
        AppendOnlyViolationError: Delta rewrites an origin's visit history.

    """
    nodes: dict[Swhid, Node] = dict(base.nodes)
    added = 0
    for swhid, node in delta.nodes.items():
        known = nodes.get(swhid)
        if known is None:
            nodes[swhid] = node
            added += 1
        elif known != node:
            raise IntegrityConflictError(swhid, "base and delta disagree")

    origins = [
        _merge_visits(url, base.origins.get(url), delta.origins.get(url))
        for url in sorted(base.origins.keys() | delta.origins.keys())
    ]
    merged = ArchiveGraph.build(
        max(base.export_timestamp, delta.export_timestamp), nodes.values(), origins
    )
    log.debug(
        "merged archives: +{} nodes, {} -> {} origins", added, len(base.origins), len(merged.origins)
    )
    return merged


def archive_includes(container: ArchiveGraph, part: ArchiveGraph) -> bool:
    """Return True if `part` ⊆ `container`: every node present, every visit history a prefix."""
    if any(container.nodes.get(swhid) != node for swhid, node in part.nodes.items()):
        return False
    for url, origin in part.origins.items():
        other = container.origins.get(url)
        if other is None or other.visits[: len(origin.visits)] != origin.visits:
            return False
    return True
