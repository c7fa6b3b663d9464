"""Typed records for the archive, fingerprints, simulation and datasets."""

from .archive import (
    ArchiveGraph,
    ArchiveView,
    Content,
    Directory,
    DirectoryEntry,
    Node,
    NodeType,
    Origin,
    OriginVisit,
    Release,
    Revision,
    Snapshot,
    SnapshotBranch,
    Swhid,
)
from .dataset import DatasetGraph, Provenance
from .fingerprint import EvalBudget, Fingerprint, OriginList, OriginListEntry
from .simulation import SimParams

__all__ = [
    "ArchiveGraph",
    "ArchiveView",
    "Content",
    "DatasetGraph",
    "Directory",
    "DirectoryEntry",
    "EvalBudget",
    "Fingerprint",
    "Node",
    "NodeType",
    "Origin",
    "OriginList",
    "OriginListEntry",
    "OriginVisit",
    "Provenance",
    "Release",
    "Revision",
    "SimParams",
    "Snapshot",
    "SnapshotBranch",
    "Swhid",
]
