"""Canonical manifests and intrinsic identifiers.

Every node is serialized into a manifest: its three-letter type tag and a
newline, then one `<field>:<byte length>:<value>` line per field in a fixed
per-type order. List fields emit one line per element in stored order;
compound elements (directory entries, snapshot branches) pack their
sub-fields as `<length>:<bytes>` runs inside one line. Child references are
the 40-hex digest followed by a one-byte type tag. The SWHID digest is the
SHA-1 of that manifest.

The builder helpers (`new_content`, `new_directory`, ...) assemble a record
and stamp it with its computed id.
"""

from __future__ import annotations

import dataclasses
import hashlib
from collections.abc import Iterable

from pvdb.errors import InvalidNodeError
from pvdb.models.archive import (
    DIGEST_SIZE,
    Content,
    Directory,
    DirectoryEntry,
    Node,
    NodeType,
    Release,
    Revision,
    Snapshot,
    SnapshotBranch,
    Swhid,
)

PAYLOAD_DIGEST_SIZE = 32

DIRECTORY_TARGETS = frozenset({NodeType.DIRECTORY, NodeType.CONTENT, NodeType.REVISION})
BRANCH_TARGETS = frozenset({NodeType.REVISION, NodeType.RELEASE})
RELEASE_TARGETS = frozenset(
    {NodeType.REVISION, NodeType.DIRECTORY, NodeType.CONTENT, NodeType.RELEASE}
)


def _int(value: int) -> bytes:
    return str(value).encode("ascii")


def _field(name: str, value: bytes) -> bytes:
    return b"%s:%d:%s" % (name.encode("ascii"), len(value), value)


def _packed(*values: bytes) -> bytes:
    return b"".join(b"%d:%s" % (len(v), v) for v in values)


def _ref(swhid: Swhid) -> bytes:
    return swhid.hex.encode("ascii") + swhid.node_type.ref_tag


def _type(swhid: Swhid) -> bytes:
    return str(swhid.node_type).encode("ascii")


# --------------------------------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------------------------------


def _check_sorted(names: list[bytes], what: str, owner: str) -> None:
    for previous, current in zip(names, names[1:], strict=False):
        if previous == current:
            raise InvalidNodeError(f"{owner}: duplicate {what} name {current!r}")
        if previous > current:
            raise InvalidNodeError(f"{owner}: {what}s are not sorted ({previous!r} > {current!r})")


def validate_node(node: Node) -> None:
    """Check the type invariants a node must satisfy before it can be hashed.

    Raises:
        InvalidNodeError: With a description of the first violated invariant.

    """
    owner = f"{node.node_type} node"
    match node:
        case Content():
            if node.length < 0:
                raise InvalidNodeError(f"{owner}: negative length {node.length}")
            if len(node.payload_digest) != PAYLOAD_DIGEST_SIZE:
                raise InvalidNodeError(f"{owner}: payload digest must be 32 bytes")
        case Directory():
            for entry in node.entries:
                if not entry.name or b"/" in entry.name or entry.name in (b".", b".."):
                    raise InvalidNodeError(f"{owner}: invalid entry name {entry.name!r}")
                if entry.target.node_type not in DIRECTORY_TARGETS:
                    raise InvalidNodeError(f"{owner}: entry {entry.name!r} targets a {entry.target.node_type}")
                if entry.perms < 0:
                    raise InvalidNodeError(f"{owner}: negative perms on {entry.name!r}")
            _check_sorted([e.name for e in node.entries], "entry", owner)
        case Revision():
            if node.tree.node_type is not NodeType.DIRECTORY:
                raise InvalidNodeError(f"{owner}: tree must be a directory")
            if any(p.node_type is not NodeType.REVISION for p in node.parents):
                raise InvalidNodeError(f"{owner}: parents must be revisions")
        case Release():
            if node.target.node_type not in RELEASE_TARGETS:
                raise InvalidNodeError(f"{owner}: release cannot target a {node.target.node_type}")
        case Snapshot():
            if any(b.target.node_type not in BRANCH_TARGETS for b in node.branches):
                raise InvalidNodeError(f"{owner}: branches must target revisions or releases")
            _check_sorted([b.name for b in node.branches], "branch", owner)
        case _:
            raise InvalidNodeError(f"not an archive node: {type(node).__name__}")


# --------------------------------------------------------------------------------------------------
# Manifests
# --------------------------------------------------------------------------------------------------


def manifest(node: Node) -> bytes:
    """Return the canonical manifest bytes of `node` (its id field is ignored).

    Raises:
        InvalidNodeError: If the node violates its invariants; entries are never re-sorted.

    """
    validate_node(node)
    match node:
        case Content():
            fields = [
                _field("length", _int(node.length)),
                _field("payload", node.payload_digest.hex().encode("ascii")),
            ]
        case Directory():
            fields = [
                _field(
                    "entry",
                    _packed(
                        b"%o" % entry.perms, _type(entry.target), _ref(entry.target), entry.name
                    ),
                )
                for entry in node.entries
            ]
        case Revision():
            fields = [
                _field("tree", _ref(node.tree)),
                *(_field("parent", _ref(p)) for p in node.parents),
                _field("author", node.author.encode("utf-8")),
                _field("author_ts", _int(node.author_timestamp)),
                _field("committer", node.committer.encode("utf-8")),
                _field("committer_ts", _int(node.committer_timestamp)),
                _field("message", node.message),
            ]
        case Release():
            fields = [
                _field("name", node.name.encode("utf-8")),
                _field("target_type", _type(node.target)),
                _field("target", _ref(node.target)),
                _field("timestamp", _int(node.timestamp)),
                _field("message", node.message),
            ]
        case Snapshot():
            fields = [
                _field("branch", _packed(_type(b.target), _ref(b.target), b.name))
                for b in node.branches
            ]
    return str(node.node_type).encode("ascii") + b"\n" + b"\n".join(fields)


def compute_swhid(node: Node) -> Swhid:
    """Return the intrinsic identifier of `node`: SHA-1 over its manifest.

    Raises:
        InvalidNodeError: If the node violates its type invariants.

    """
    return Swhid(node.node_type, hashlib.sha1(manifest(node), usedforsecurity=False).digest())


# --------------------------------------------------------------------------------------------------
# Builders
# --------------------------------------------------------------------------------------------------


def _seal[N: Node](node: N) -> N:
    return dataclasses.replace(node, id=compute_swhid(node))


def _placeholder(node_type: NodeType) -> Swhid:
    return Swhid(node_type, bytes(DIGEST_SIZE))


def new_content(length: int, payload_digest: bytes) -> Content:
    return _seal(Content(_placeholder(NodeType.CONTENT), length, payload_digest))


def content_for_bytes(data: bytes) -> Content:
    """Content node describing `data` (only its length and SHA-256 are kept)."""
    return new_content(len(data), hashlib.sha256(data).digest())


def new_directory(entries: Iterable[DirectoryEntry]) -> Directory:
    """Directory over `entries`, sorted bytewise by name before hashing."""
    ordered = tuple(sorted(entries, key=lambda e: e.name))
    return _seal(Directory(_placeholder(NodeType.DIRECTORY), ordered))


def new_revision(
    tree: Swhid,
    parents: Iterable[Swhid] = (),
    *,
    author: str = "",
    author_timestamp: int = 0,
    committer: str | None = None,
    committer_timestamp: int | None = None,
    message: bytes = b"",
) -> Revision:
    """Revision node; committer fields default to the author fields."""
    return _seal(
        Revision(
            _placeholder(NodeType.REVISION),
            tree=tree,
            parents=tuple(parents),
            author=author,
            author_timestamp=author_timestamp,
            committer=author if committer is None else committer,
            committer_timestamp=(
                author_timestamp if committer_timestamp is None else committer_timestamp
            ),
            message=message,
        )
    )


def new_release(name: str, target: Swhid, *, timestamp: int = 0, message: bytes = b"") -> Release:
    return _seal(Release(_placeholder(NodeType.RELEASE), name, target, message, timestamp))


def new_snapshot(branches: Iterable[SnapshotBranch]) -> Snapshot:
    """Snapshot over `branches`, sorted bytewise by name before hashing."""
    ordered = tuple(sorted(branches, key=lambda b: b.name))
    return _seal(Snapshot(_placeholder(NodeType.SNAPSHOT), ordered))
