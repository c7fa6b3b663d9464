"""Timestamp-restricted views of an archive."""

from __future__ import annotations

from pvdb.models.archive import ArchiveGraph, ArchiveView


def restrict_to_timestamp(archive: ArchiveGraph | ArchiveView, t: int) -> ArchiveView:
    """Hide every visit after `t`.

    Each origin keeps only its visits with timestamp ≤ t; origins left with
    no visit drop out of the universe. The node store is shared, and the
    underlying archive is never modified. Restricting a view again keeps the
    earlier time.

    Args:
        archive (ArchiveGraph | ArchiveView): Archive or already-restricted view.
        t (int): Unix seconds; may pre-date every visit.

    Returns:
        ArchiveView: The read-only view at `t`.

    """
    return archive.restrict(t)
