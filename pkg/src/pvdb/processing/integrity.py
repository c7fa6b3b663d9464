"""Integrity verification of an archive.

`verify_integrity` recomputes every node id, checks that each reference
resolves to a node of the referenced type, and checks visit histories. It
never raises on a bad archive: every problem becomes a report entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

from loguru import logger

from pvdb.errors import InvalidNodeError
from pvdb.models.archive import ArchiveGraph, NodeType
from pvdb.processing.hashing import compute_swhid

log = logger.bind(component="integrity")


class IssueKind(StrEnum):
    HASH_MISMATCH = "hash-mismatch"
    INVALID_NODE = "invalid-node"
    DANGLING_REFERENCE = "dangling-reference"
    TYPE_MISMATCH = "type-mismatch"
    VISIT_AFTER_EXPORT = "visit-after-export"
    VISIT_ORDER = "visit-order"
    HISTORY_DIGEST = "history-digest"
    DATASET_HASH = "dataset-hash"
    UNREACHABLE_NODE = "unreachable-node"


@dataclass(frozen=True, slots=True, order=True)
class IntegrityIssue:
    """One finding. `subject` is the Swhid concerned, or the origin url for visit issues."""

    subject: str
    kind: IssueKind
    detail: str = ""


@dataclass(frozen=True, slots=True)
class IntegrityReport:
    issues: tuple[IntegrityIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def subjects(self, kind: IssueKind | None = None) -> set[str]:
        return {i.subject for i in self.issues if kind is None or i.kind is kind}


def verify_integrity(archive: ArchiveGraph) -> IntegrityReport:
    """Recompute ids and check closure and visit invariants of `archive`.

    Args:
        archive (ArchiveGraph): The archive to check.

    Returns:
        IntegrityReport: `ok` iff there are no mismatches, dangling references
            or malformed visit histories. Issues are sorted by subject.

    """
    issues: list[IntegrityIssue] = []

    for swhid, node in archive.nodes.items():
        if swhid.node_type is not node.node_type or node.id != swhid:
            issues.append(
                IntegrityIssue(str(swhid), IssueKind.TYPE_MISMATCH, f"stored as {node.id}")
            )
            continue
        try:
            computed = compute_swhid(node)
        except (InvalidNodeError, UnicodeEncodeError) as exc:
            # text fields that are not valid UTF-8 cannot be hashed
            issues.append(IntegrityIssue(str(swhid), IssueKind.INVALID_NODE, str(exc)))
            continue
        if computed != swhid:
            issues.append(
                IntegrityIssue(str(swhid), IssueKind.HASH_MISMATCH, f"recomputed {computed}")
            )
        for ref in node.references():
            if ref not in archive.nodes:
                issues.append(
                    IntegrityIssue(str(ref), IssueKind.DANGLING_REFERENCE, f"referenced by {swhid}")
                )

    for url, origin in archive.origins.items():
        previous: int | None = None
        for visit in origin.visits:
            if previous is not None and visit.timestamp <= previous:
                issues.append(
                    IntegrityIssue(url, IssueKind.VISIT_ORDER, f"visit at {visit.timestamp}")
                )
            if visit.timestamp > archive.export_timestamp:
                issues.append(
                    IntegrityIssue(url, IssueKind.VISIT_AFTER_EXPORT, f"visit at {visit.timestamp}")
                )
            previous = visit.timestamp
            if visit.snapshot.node_type is not NodeType.SNAPSHOT:
                issues.append(
                    IntegrityIssue(url, IssueKind.TYPE_MISMATCH, f"visit points to {visit.snapshot}")
                )
            elif visit.snapshot not in archive.nodes:
                issues.append(
                    IntegrityIssue(str(visit.snapshot), IssueKind.DANGLING_REFERENCE, f"visited by {url}")
                )

    report = IntegrityReport(tuple(sorted(set(issues))))
    if report.ok:
        log.debug("archive verified: {} nodes, {} origins", len(archive.nodes), len(archive.origins))
    else:
        log.warning("archive has {} integrity issues", len(report.issues))
    return report
