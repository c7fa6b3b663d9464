"""Line-delimited exchange format for archives (`.pvdb.jsonl`).

Each line is one JSON object with a `kind` discriminator. The `meta` record
comes first and exactly once; the other records may appear in any order on
load. `save_archive` writes the canonical form: records sorted by
(kind rank, id or url), keys sorted, no whitespace, ASCII escaping, so that
file equality is archive equality.

Byte strings (entry and branch names, messages) travel as JSON strings
decoded from UTF-8 with surrogate escaping; with ASCII escaping on write,
any byte sequence round-trips exactly.

Origins and visits are not content-addressed, so the meta record carries a
`history_digest`: SHA-256 over the canonical meta, origin and visit lines.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Any

from dacite import Config, DaciteError, from_dict
from loguru import logger

from pvdb.errors import (
    DanglingReferenceError,
    ExchangeFormatError,
    HashMismatchError,
    IntegrityConflictError,
    IntegrityError,
    InvalidNodeError,
    StoreIOError,
    UnsupportedFormatError,
)
from pvdb.models.archive import (
    ArchiveGraph,
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
from pvdb.models.dataset import DatasetGraph, Provenance
from pvdb.processing.integrity import IntegrityIssue, IntegrityReport, IssueKind, verify_integrity
from pvdb.utils.timefmt import from_rfc3339, to_rfc3339

FORMAT_VERSION = 1
FILE_SUFFIX = ".pvdb.jsonl"

log = logger.bind(component="store")

_strict = Config(strict=True, check_types=True)


# --------------------------------------------------------------------------------------------------
# Record shapes
# --------------------------------------------------------------------------------------------------


@dataclass
class MetaRecord:
    kind: str
    format_version: int
    export_timestamp: str
    history_digest: str
    source_export_timestamp: str | None = None
    fingerprint_timestamp: str | None = None
    dataset_hash: str | None = None


@dataclass
class ContentRecord:
    kind: str
    id: str
    length: int
    payload_digest: str


@dataclass
class EntryRecord:
    name: str
    perms: int
    target: str
    target_type: str


@dataclass
class DirectoryRecord:
    kind: str
    id: str
    entries: list[EntryRecord]


@dataclass
class RevisionRecord:
    kind: str
    id: str
    tree: str
    parents: list[str]
    author: str
    author_timestamp: str
    committer: str
    committer_timestamp: str
    message: str


@dataclass
class ReleaseRecord:
    kind: str
    id: str
    name: str
    target: str
    target_type: str
    timestamp: str
    message: str


@dataclass
class BranchRecord:
    name: str
    target: str
    target_type: str


@dataclass
class SnapshotRecord:
    kind: str
    id: str
    branches: list[BranchRecord]


@dataclass
class OriginRecord:
    kind: str
    url: str


@dataclass
class VisitRecord:
    kind: str
    origin: str
    date: str
    snapshot: str


KIND_RANK = {
    "meta": 0,
    "content": 1,
    "directory": 2,
    "revision": 3,
    "release": 4,
    "snapshot": 5,
    "origin": 6,
    "visit": 7,
}


def _bytes_to_text(value: bytes) -> str:
    return value.decode("utf-8", "surrogateescape")


def _text_to_bytes(value: str) -> bytes:
    return value.encode("utf-8", "surrogateescape")


def _dump(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


# --------------------------------------------------------------------------------------------------
# Encoding
# --------------------------------------------------------------------------------------------------


def node_record(node: Node) -> dict[str, Any]:
    """Exchange record (as a plain dict) for one node."""
    match node:
        case Content():
            return {
                "kind": "content",
                "id": node.id.hex,
                "length": node.length,
                "payload_digest": node.payload_digest.hex(),
            }
        case Directory():
            return {
                "kind": "directory",
                "id": node.id.hex,
                "entries": [
                    {
                        "name": _bytes_to_text(e.name),
                        "perms": e.perms,
                        "target": e.target.hex,
                        "target_type": str(e.target.node_type),
                    }
                    for e in node.entries
                ],
            }
        case Revision():
            return {
                "kind": "revision",
                "id": node.id.hex,
                "tree": node.tree.hex,
                "parents": [p.hex for p in node.parents],
                "author": node.author,
                "author_timestamp": to_rfc3339(node.author_timestamp),
                "committer": node.committer,
                "committer_timestamp": to_rfc3339(node.committer_timestamp),
                "message": _bytes_to_text(node.message),
            }
        case Release():
            return {
                "kind": "release",
                "id": node.id.hex,
                "name": node.name,
                "target": node.target.hex,
                "target_type": str(node.target.node_type),
                "timestamp": to_rfc3339(node.timestamp),
                "message": _bytes_to_text(node.message),
            }
        case Snapshot():
            return {
                "kind": "snapshot",
                "id": node.id.hex,
                "branches": [
                    {
                        "name": _bytes_to_text(b.name),
                        "target": b.target.hex,
                        "target_type": str(b.target.node_type),
                    }
                    for b in node.branches
                ],
            }
    raise TypeError(f"not an archive node: {type(node).__name__}")


def _meta_record(archive: ArchiveGraph, provenance: Provenance | None) -> dict[str, Any]:
    meta: dict[str, Any] = {
        "kind": "meta",
        "format_version": FORMAT_VERSION,
        "export_timestamp": to_rfc3339(archive.export_timestamp),
    }
    if provenance is not None:
        meta["source_export_timestamp"] = to_rfc3339(provenance.source_export_timestamp)
        meta["fingerprint_timestamp"] = to_rfc3339(provenance.fingerprint_timestamp)
        meta["dataset_hash"] = provenance.dataset_hash
    return meta


def _history_lines(archive: ArchiveGraph) -> Iterator[str]:
    for url in archive.origins:
        yield _dump({"kind": "origin", "url": url})
    for url, origin in archive.origins.items():
        for visit in origin.visits:
            yield _dump(
                {
                    "kind": "visit",
                    "origin": url,
                    "date": to_rfc3339(visit.timestamp),
                    "snapshot": visit.snapshot.hex,
                }
            )


def history_digest(archive: ArchiveGraph, provenance: Provenance | None = None) -> str:
    """SHA-256 over the canonical meta (without digest), origin and visit lines."""
    h = hashlib.sha256()
    h.update(_dump(_meta_record(archive, provenance)).encode("ascii") + b"\n")
    for line in _history_lines(archive):
        h.update(line.encode("ascii") + b"\n")
    return h.hexdigest()


def archive_lines(archive: ArchiveGraph, provenance: Provenance | None = None) -> list[str]:
    """Canonical exchange lines for `archive`, meta record first."""
    meta = _meta_record(archive, provenance)
    meta["history_digest"] = history_digest(archive, provenance)
    nodes = sorted(archive.nodes.values(), key=lambda n: (KIND_RANK[_KIND[n.node_type]], n.id.hex))
    return [_dump(meta), *(_dump(node_record(n)) for n in nodes), *_history_lines(archive)]


_KIND = {
    NodeType.CONTENT: "content",
    NodeType.DIRECTORY: "directory",
    NodeType.REVISION: "revision",
    NodeType.RELEASE: "release",
    NodeType.SNAPSHOT: "snapshot",
}


def save_archive(
    archive: ArchiveGraph, path: str | Path, *, provenance: Provenance | None = None
) -> Path:
    """Write `archive` in canonical exchange form.

    Args:
        archive (ArchiveGraph): Archive to persist; expected to verify ok.
        path (str | Path): Output file.
        provenance (Provenance | None): Dataset provenance to record in the meta line.

    Returns:
        Path: The written path.

    Raises:
        StoreIOError: If the file cannot be written.

    """
    p = Path(path)
    text = "\n".join(archive_lines(archive, provenance)) + "\n"
    try:
        p.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise StoreIOError(p, exc) from exc
    log.debug("saved {} nodes, {} origins to {}", len(archive.nodes), len(archive.origins), p)
    return p


def save_dataset(dataset: DatasetGraph, path: str | Path) -> Path:
    """Write a dataset graph: the exchange format with a provenance-carrying meta record."""
    return save_archive(dataset.graph, path, provenance=dataset.provenance)


# --------------------------------------------------------------------------------------------------
# Decoding
# --------------------------------------------------------------------------------------------------


def _swhid(node_type: str, hex_digest: str) -> Swhid:
    return Swhid.from_hex(node_type, hex_digest)


def _decode_content(data: dict[str, Any]) -> Node:
    rec = from_dict(ContentRecord, data, config=_strict)
    return Content(
        _swhid("cnt", rec.id), rec.length, bytes.fromhex(_lower_hex(rec.payload_digest, 64))
    )


def _decode_directory(data: dict[str, Any]) -> Node:
    rec = from_dict(DirectoryRecord, data, config=_strict)
    entries = tuple(
        DirectoryEntry(_text_to_bytes(e.name), _swhid(e.target_type, e.target), e.perms)
        for e in rec.entries
    )
    return Directory(_swhid("dir", rec.id), entries)


def _decode_revision(data: dict[str, Any]) -> Node:
    rec = from_dict(RevisionRecord, data, config=_strict)
    return Revision(
        id=_swhid("rev", rec.id),
        tree=_swhid("dir", rec.tree),
        parents=tuple(_swhid("rev", p) for p in rec.parents),
        author=rec.author,
        author_timestamp=_timestamp(rec.author_timestamp),
        committer=rec.committer,
        committer_timestamp=_timestamp(rec.committer_timestamp),
        message=_text_to_bytes(rec.message),
    )


def _decode_release(data: dict[str, Any]) -> Node:
    rec = from_dict(ReleaseRecord, data, config=_strict)
    return Release(
        id=_swhid("rel", rec.id),
        name=rec.name,
        target=_swhid(rec.target_type, rec.target),
        message=_text_to_bytes(rec.message),
        timestamp=_timestamp(rec.timestamp),
    )


def _decode_snapshot(data: dict[str, Any]) -> Node:
    rec = from_dict(SnapshotRecord, data, config=_strict)
    branches = tuple(
        SnapshotBranch(_text_to_bytes(b.name), _swhid(b.target_type, b.target))
        for b in rec.branches
    )
    return Snapshot(_swhid("snp", rec.id), branches)


_NODE_DECODERS: dict[str, Callable[[dict[str, Any]], Node]] = {
    "content": _decode_content,
    "directory": _decode_directory,
    "revision": _decode_revision,
    "release": _decode_release,
    "snapshot": _decode_snapshot,
}


def _timestamp(text: str) -> int:
    ts = from_rfc3339(text)
    if to_rfc3339(ts) != text:
        raise ValueError(f"timestamp {text!r} is not in the form YYYY-MM-DDTHH:MM:SSZ")
    return ts


def _lower_hex(value: str, length: int) -> str:
    if len(value) != length or value != value.lower():
        raise ValueError(f"expected {length} lowercase hex characters, got {value!r}")
    return value


@dataclass(frozen=True, slots=True)
class LoadedArchive:
    """Result of parsing an exchange file before integrity checks.

    `archive` is built without validation so that a damaged file can still be
    reported on in full by `check`.
    """

    archive: ArchiveGraph
    provenance: Provenance | None
    recorded_digest: str

    def check(self) -> IntegrityReport:
        """Integrity report including the history digest check."""
        report = verify_integrity(self.archive)
        if history_digest(self.archive, self.provenance) == self.recorded_digest:
            return report
        issue = IntegrityIssue("meta", IssueKind.HISTORY_DIGEST, "origins or visits were altered")
        return IntegrityReport(tuple(sorted((*report.issues, issue))))


def read_archive(path: str | Path) -> LoadedArchive:
    """Parse an exchange file without running integrity checks.

    Raises:
        StoreIOError: The file cannot be read.
        ExchangeFormatError: A line is not a valid record (with its line number).
        UnsupportedFormatError: The meta record declares an unknown format version.
        IntegrityConflictError: Two different records share a Swhid.

    """
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise StoreIOError(p, exc) from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ExchangeFormatError(p, raw[: exc.start].count(b"\n") + 1, "invalid UTF-8") from exc

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ExchangeFormatError(p, 1, "empty file: a meta record is required")

    meta: MetaRecord | None = None
    nodes: dict[Swhid, Node] = {}
    origins: set[str] = set()
    visits: dict[str, list[tuple[int, OriginVisit]]] = {}

    for lineno, line in enumerate(lines, start=1):
        try:
            data = json.loads(line)
            if _dump(data) != line:
                raise ValueError("record is not in canonical form")
            if not isinstance(data, dict) or not isinstance(data.get("kind"), str):
                raise ValueError("record must be an object with a string 'kind'")
            kind = data["kind"]
            if lineno == 1 and kind != "meta":
                raise ValueError("the first record must be the meta record")
            if kind == "meta":
                if meta is not None:
                    raise ValueError("duplicate meta record")
                meta = from_dict(MetaRecord, data, config=_strict)
                if meta.format_version != FORMAT_VERSION:
                    raise UnsupportedFormatError(
                        f"{p}: format version {meta.format_version} is not supported "
                        f"(this build reads version {FORMAT_VERSION})"
                    )
                _timestamp(meta.export_timestamp)
            elif kind in _NODE_DECODERS:
                node = _NODE_DECODERS[kind](data)
                known = nodes.get(node.id)
                if known is not None and known != node:
                    raise IntegrityConflictError(node.id, f"line {lineno}")
                nodes[node.id] = node
            elif kind == "origin":
                rec = from_dict(OriginRecord, data, config=_strict)
                if not rec.url:
                    raise ValueError("origin url must be non-empty")
                if rec.url in origins:
                    raise ValueError(f"duplicate origin {rec.url}")
                origins.add(rec.url)
            elif kind == "visit":
                rec = from_dict(VisitRecord, data, config=_strict)
                ts = _timestamp(rec.date)
                visits.setdefault(rec.origin, []).append(
                    (lineno, OriginVisit(ts, _swhid("snp", rec.snapshot)))
                )
            else:
                raise ValueError(f"unknown record kind {kind!r}")
        except (UnsupportedFormatError, IntegrityConflictError):
            raise
        except (ValueError, TypeError, DaciteError) as exc:
            raise ExchangeFormatError(p, lineno, str(exc)) from exc

    assert meta is not None
    for url, entries in visits.items():
        if url not in origins:
            raise ExchangeFormatError(p, entries[0][0], f"visit of unknown origin {url}")

    built = {
        url: Origin(url, tuple(v for _, v in sorted(visits.get(url, []), key=lambda e: e[1].timestamp)))
        for url in sorted(origins)
    }
    archive = ArchiveGraph(
        export_timestamp=_timestamp(meta.export_timestamp),
        origins=MappingProxyType(built),
        nodes=MappingProxyType(dict(sorted(nodes.items()))),
    )
    provenance = None
    if meta.dataset_hash is not None:
        if meta.source_export_timestamp is None or meta.fingerprint_timestamp is None:
            raise ExchangeFormatError(p, 1, "incomplete provenance in meta record")
        provenance = Provenance(
            source_export_timestamp=_timestamp(meta.source_export_timestamp),
            fingerprint_timestamp=_timestamp(meta.fingerprint_timestamp),
            dataset_hash=meta.dataset_hash,
        )
    return LoadedArchive(archive, provenance, meta.history_digest)


def _raise_first(path: Path, report: IntegrityReport) -> None:
    issue = report.issues[0]
    suffix = f" ({len(report.issues)} issues in total)" if len(report.issues) > 1 else ""
    log.error("{}: {} {} {}", path, issue.kind, issue.subject, issue.detail)
    match issue.kind:
        case IssueKind.HASH_MISMATCH:
            raise HashMismatchError(issue.subject, issue.detail.removeprefix("recomputed "))
        case IssueKind.DANGLING_REFERENCE:
            raise DanglingReferenceError(issue.subject, issue.detail.removeprefix("referenced by "))
        case IssueKind.INVALID_NODE:
            raise InvalidNodeError(f"{issue.subject}: {issue.detail}{suffix}")
        case _:
            raise IntegrityError(f"{path}: {issue.kind} {issue.subject}: {issue.detail}{suffix}")


def _load(path: str | Path) -> LoadedArchive:
    loaded = read_archive(path)
    report = loaded.check()
    if not report.ok:
        _raise_first(Path(path), report)
    return loaded


def load_archive(path: str | Path) -> ArchiveGraph:
    """Load and verify an exchange file.

    The in-memory value does not depend on the order of records in the file.

    Raises:
        ExchangeFormatError: Parse error, with line number.
        UnsupportedFormatError: Unknown format version.
        IntegrityConflictError: Duplicate Swhid with differing bodies.
        HashMismatchError: A node does not match its id.
        DanglingReferenceError: A reference does not resolve.
        IntegrityError: Any other integrity failure (visit order, history digest).

    """
    loaded = _load(path)
    log.debug("loaded {} nodes, {} origins from {}", len(loaded.archive.nodes), len(loaded.archive.origins), path)
    return loaded.archive


def load_dataset(path: str | Path) -> DatasetGraph:
    """Load a dataset graph file (an exchange file whose meta record carries provenance).

    Raises:
        ExchangeFormatError: If the file has no provenance header.

    """
    loaded = _load(path)
    if loaded.provenance is None:
        raise ExchangeFormatError(path, 1, "not a dataset file: the meta record has no provenance")
    return DatasetGraph(loaded.archive, loaded.provenance)


def load_source(path: str | Path) -> ArchiveGraph | DatasetGraph:
    """Load an exchange file as a dataset when its meta record carries provenance, else as an archive."""
    loaded = _load(path)
    if loaded.provenance is None:
        return loaded.archive
    return DatasetGraph(loaded.archive, loaded.provenance)
