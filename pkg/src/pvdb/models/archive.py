"""Merkle-DAG records of the archive object model.

The node classes mirror the archive metamodel: `Snapshot`, `Release`,
`Revision`, `Directory` and `Content` are content-addressed by a `Swhid`;
`Origin` and `OriginVisit` carry the crawl history; `ArchiveGraph` is one
immutable export and `ArchiveView` a timestamp-restricted reading of it.

All records are frozen. Nodes compare by value but hash by id, so they can
be deduplicated cheaply in sets while tampered copies still compare unequal.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import StrEnum
from types import MappingProxyType

from pvdb.errors import IntegrityConflictError, InvalidNodeError

SCHEME_VERSION = 1
DIGEST_SIZE = 20


class NodeType(StrEnum):
    """Three-letter node type tags used in SWHIDs and manifests."""

    SNAPSHOT = "snp"
    RELEASE = "rel"
    REVISION = "rev"
    DIRECTORY = "dir"
    CONTENT = "cnt"

    @property
    def ref_tag(self) -> bytes:
        """One-byte tag appended to child references in manifests."""
        return _REF_TAGS[self]


_REF_TAGS = {
    NodeType.CONTENT: b"c",
    NodeType.DIRECTORY: b"d",
    NodeType.REVISION: b"r",
    NodeType.RELEASE: b"t",
    NodeType.SNAPSHOT: b"s",
}


@dataclass(frozen=True, slots=True, order=True)
class Swhid:
    """Intrinsic identifier `swh:1:<type>:<40 hex>` of an archive node."""

    node_type: NodeType
    digest: bytes

    def __post_init__(self) -> None:
        if len(self.digest) != DIGEST_SIZE:
            raise ValueError(f"digest must be {DIGEST_SIZE} bytes, got {len(self.digest)}")

    @property
    def hex(self) -> str:
        return self.digest.hex()

    def __str__(self) -> str:
        return f"swh:{SCHEME_VERSION}:{self.node_type}:{self.hex}"

    @classmethod
    def from_hex(cls, node_type: NodeType | str, hex_digest: str) -> Swhid:
        """Build a Swhid from a type tag and 40 lowercase hex characters.

        Raises:
            ValueError: If the digest is not 40 lowercase hex characters.

        """
        if len(hex_digest) != 2 * DIGEST_SIZE or hex_digest != hex_digest.lower():
            raise ValueError(f"expected 40 lowercase hex characters, got {hex_digest!r}")
        return cls(NodeType(node_type), bytes.fromhex(hex_digest))

    @classmethod
    def parse(cls, text: str) -> Swhid:
        """Parse the canonical `swh:1:<type>:<hex>` rendering.

        Raises:
            ValueError: If the text is not a canonical SWHID.

        """
        parts = text.split(":")
        if len(parts) != 4 or parts[0] != "swh" or parts[1] != str(SCHEME_VERSION):
            raise ValueError(f"not a SWHID: {text!r}")
        return cls.from_hex(parts[2], parts[3])


# --------------------------------------------------------------------------------------------------
# Nodes
# --------------------------------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Content:
    """File metadata; the bytes themselves are never stored."""

    id: Swhid
    length: int
    payload_digest: bytes

    node_type = NodeType.CONTENT

    def __hash__(self) -> int:
        return hash(self.id)

    def references(self) -> tuple[Swhid, ...]:
        return ()


@dataclass(frozen=True, slots=True)
class DirectoryEntry:
    """A named child of a directory (file, subdirectory or submodule revision)."""

    name: bytes
    target: Swhid
    perms: int


@dataclass(frozen=True, slots=True)
class Directory:
    id: Swhid
    entries: tuple[DirectoryEntry, ...]

    node_type = NodeType.DIRECTORY

    def __hash__(self) -> int:
        return hash(self.id)

    def references(self) -> tuple[Swhid, ...]:
        return tuple(e.target for e in self.entries)


@dataclass(frozen=True, slots=True)
class Revision:
    """A commit: a tree, ordered parents and author/committer metadata."""

    id: Swhid
    tree: Swhid
    parents: tuple[Swhid, ...]
    author: str
    author_timestamp: int
    committer: str
    committer_timestamp: int
    message: bytes

    node_type = NodeType.REVISION

    def __hash__(self) -> int:
        return hash(self.id)

    def references(self) -> tuple[Swhid, ...]:
        return (self.tree, *self.parents)


@dataclass(frozen=True, slots=True)
class Release:
    id: Swhid
    name: str
    target: Swhid
    message: bytes
    timestamp: int

    node_type = NodeType.RELEASE

    def __hash__(self) -> int:
        return hash(self.id)

    def references(self) -> tuple[Swhid, ...]:
        return (self.target,)


@dataclass(frozen=True, slots=True)
class SnapshotBranch:
    name: bytes
    target: Swhid


@dataclass(frozen=True, slots=True)
class Snapshot:
    id: Swhid
    branches: tuple[SnapshotBranch, ...]

    node_type = NodeType.SNAPSHOT

    def __hash__(self) -> int:
        return hash(self.id)

    def references(self) -> tuple[Swhid, ...]:
        return tuple(b.target for b in self.branches)


type Node = Content | Directory | Revision | Release | Snapshot

NODE_CLASSES: dict[NodeType, type] = {
    NodeType.CONTENT: Content,
    NodeType.DIRECTORY: Directory,
    NodeType.REVISION: Revision,
    NodeType.RELEASE: Release,
    NodeType.SNAPSHOT: Snapshot,
}


# --------------------------------------------------------------------------------------------------
# Origins
# --------------------------------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class OriginVisit:
    timestamp: int
    snapshot: Swhid


@dataclass(frozen=True, slots=True)
class Origin:
    """A repository, keyed by url, with its visits in strictly increasing time order."""

    url: str
    visits: tuple[OriginVisit, ...]

    def __hash__(self) -> int:
        return hash(self.url)

    @property
    def last_visit(self) -> OriginVisit | None:
        return self.visits[-1] if self.visits else None

    def visits_until(self, t: int) -> tuple[OriginVisit, ...]:
        """Visits with timestamp ≤ t (the list is sorted, so this is a prefix)."""
        end = len(self.visits)
        while end and self.visits[end - 1].timestamp > t:
            end -= 1
        return self.visits[:end]


# --------------------------------------------------------------------------------------------------
# Archive
# --------------------------------------------------------------------------------------------------


def _check_visits(origin: Origin, export_timestamp: int) -> None:
    if not origin.url:
        raise InvalidNodeError("origin url must be non-empty")
    previous: int | None = None
    for visit in origin.visits:
        if previous is not None and visit.timestamp <= previous:
            raise InvalidNodeError(
                f"visits of {origin.url} are not strictly increasing at {visit.timestamp}"
            )
        if visit.timestamp > export_timestamp:
            raise InvalidNodeError(
                f"visit of {origin.url} at {visit.timestamp} is after the export timestamp "
                f"{export_timestamp}"
            )
        previous = visit.timestamp


@dataclass(frozen=True, slots=True)
class ArchiveGraph:
    """One immutable export: node store, origins and export timestamp.

    Use `ArchiveGraph.build` to construct validated values; the plain
    constructor performs no checks and exists for decoding and tests.
    """

    export_timestamp: int
    origins: Mapping[str, Origin]
    nodes: Mapping[Swhid, Node]

    @classmethod
    def build(
        cls, export_timestamp: int, nodes: Iterable[Node], origins: Iterable[Origin]
    ) -> ArchiveGraph:
        """Assemble an archive, rejecting conflicting ids and malformed visit histories.

        Identical duplicate nodes are accepted (content addressing makes them
        the same node); duplicate origin urls are not.

        Raises:
            IntegrityConflictError: Two different records share a Swhid.
            InvalidNodeError: An origin is duplicated or its visits are unordered,
                tied, or later than the export.

        """
        store: dict[Swhid, Node] = {}
        for node in nodes:
            known = store.get(node.id)
            if known is not None and known != node:
                raise IntegrityConflictError(node.id)
            store[node.id] = node

        by_url: dict[str, Origin] = {}
        for origin in origins:
            if origin.url in by_url:
                raise InvalidNodeError(f"duplicate origin {origin.url}")
            _check_visits(origin, export_timestamp)
            by_url[origin.url] = origin

        return cls(
            export_timestamp=export_timestamp,
            origins=MappingProxyType(dict(sorted(by_url.items()))),
            nodes=MappingProxyType(dict(sorted(store.items()))),
        )

    @classmethod
    def empty(cls, export_timestamp: int) -> ArchiveGraph:
        return cls.build(export_timestamp, (), ())

    def node(self, swhid: Swhid) -> Node | None:
        return self.nodes.get(swhid)

    def restrict(self, t: int) -> ArchiveView:
        """Return the read-only view of this archive as of time `t`."""
        return ArchiveView.of(self, t)


@dataclass(frozen=True, slots=True)
class ArchiveView:
    """An archive as it stood at `timestamp`: later visits are hidden.

    Origins without any visit at or before `timestamp` are left out of the
    origin universe. The node store is shared with the underlying archive.
    """

    archive: ArchiveGraph
    timestamp: int
    origins: Mapping[str, Origin]

    @classmethod
    def of(cls, archive: ArchiveGraph, t: int) -> ArchiveView:
        restricted: dict[str, Origin] = {}
        for url, origin in archive.origins.items():
            visits = origin.visits_until(t)
            if not visits:
                continue
            restricted[url] = origin if len(visits) == len(origin.visits) else Origin(url, visits)
        return cls(archive=archive, timestamp=t, origins=MappingProxyType(restricted))

    def __hash__(self) -> int:
        return hash((self.archive.export_timestamp, self.timestamp, len(self.origins)))

    @property
    def nodes(self) -> Mapping[Swhid, Node]:
        return self.archive.nodes

    @property
    def export_timestamp(self) -> int:
        return self.archive.export_timestamp

    def node(self, swhid: Swhid) -> Node | None:
        return self.archive.nodes.get(swhid)

    def restrict(self, t: int) -> ArchiveView:
        """Restrict further; restricting twice keeps the earlier of the two times."""
        return ArchiveView.of(self.archive, min(t, self.timestamp))

    def last_visit(self, url: str) -> OriginVisit | None:
        origin = self.origins.get(url)
        return origin.last_visit if origin is not None else None
