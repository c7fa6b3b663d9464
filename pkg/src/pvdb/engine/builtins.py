"""Attribute navigation and built-in operations over archive records."""

from __future__ import annotations

from collections.abc import Callable
from typing import Any

from pvdb.errors import ClosureCycleError
from pvdb.models.archive import (
    ArchiveView,
    Content,
    Directory,
    DirectoryEntry,
    Origin,
    OriginVisit,
    Release,
    Revision,
    Snapshot,
    SnapshotBranch,
)
from pvdb.engine.values import Collection

type Navigator = Callable[[Any, ArchiveView], Any]

RUNTIME_CLASSES: dict[type, str] = {
    ArchiveView: "Graph",
    Origin: "Origin",
    OriginVisit: "OriginVisit",
    Snapshot: "Snapshot",
    SnapshotBranch: "SnapshotBranch",
    Release: "Release",
    Revision: "Revision",
    Directory: "Directory",
    DirectoryEntry: "DirectoryEntry",
    Content: "Content",
}


def class_of(value: Any) -> str | None:
    """Metamodel class name of a runtime object; None for primitives and null."""
    return RUNTIME_CLASSES.get(type(value))


def get_last_snapshot(origin: Origin, view: ArchiveView) -> Snapshot | None:
    """Snapshot of the origin's latest visit at or before the view time."""
    visit = view.last_visit(origin.url)
    if visit is None:
        return None
    node = view.node(visit.snapshot)
    return node if isinstance(node, Snapshot) else None


def get_revision(branch: SnapshotBranch, view: ArchiveView) -> Revision | None:
    """Revision a branch points to, following release chains; None if the chain ends elsewhere.

    Raises:
        ClosureCycleError: If a release chain loops.

    """
    target = view.node(branch.target)
    seen: set[object] = set()
    while isinstance(target, Release):
        if target.id in seen:
            raise ClosureCycleError(f"release chain from branch {branch.name!r} loops at {target.id}")
        seen.add(target.id)
        target = view.node(target.target)
    return target if isinstance(target, Revision) else None


def _text(value: str) -> bytes:
    return value.encode("utf-8")


def _first_parent(rev: Revision, view: ArchiveView) -> Revision | None:
    if not rev.parents:
        return None
    node = view.node(rev.parents[0])
    return node if isinstance(node, Revision) else None


def _nodes(view: ArchiveView, ids: tuple) -> Collection:
    return Collection("Sequence", (view.node(i) for i in ids))


_BASE: dict[tuple[str, str], Navigator] = {
    ("Graph", "timestamp"): lambda g, v: v.timestamp,
    ("Graph", "origins"): lambda g, v: Collection(
        "Set", sorted(v.origins.values(), key=lambda o: o.url.encode("utf-8"))
    ),
    ("Origin", "url"): lambda o, v: _text(o.url),
    ("Origin", "visits"): lambda o, v: Collection("Sequence", o.visits_until(v.timestamp)),
    ("OriginVisit", "timestamp"): lambda ov, v: ov.timestamp,
    ("OriginVisit", "snapshot"): lambda ov, v: v.node(ov.snapshot),
    ("Snapshot", "branches"): lambda s, v: Collection("Sequence", s.branches),
    ("SnapshotBranch", "name"): lambda b, v: b.name,
    ("SnapshotBranch", "target"): lambda b, v: v.node(b.target),
    ("Release", "name"): lambda r, v: _text(r.name),
    ("Release", "message"): lambda r, v: r.message,
    ("Release", "timestamp"): lambda r, v: r.timestamp,
    ("Release", "target"): lambda r, v: v.node(r.target),
    ("Revision", "tree"): lambda r, v: v.node(r.tree),
    ("Revision", "parent"): _first_parent,
    ("Revision", "parents"): lambda r, v: _nodes(v, r.parents),
    ("Revision", "author"): lambda r, v: _text(r.author),
    ("Revision", "committer"): lambda r, v: _text(r.committer),
    ("Revision", "message"): lambda r, v: r.message,
    ("Revision", "authorTimestamp"): lambda r, v: r.author_timestamp,
    ("Revision", "commiterTimestamp"): lambda r, v: r.committer_timestamp,
    ("Revision", "committerTimestamp"): lambda r, v: r.committer_timestamp,
    ("Directory", "entries"): lambda d, v: Collection("Sequence", d.entries),
    ("DirectoryEntry", "name"): lambda e, v: e.name,
    ("DirectoryEntry", "perms"): lambda e, v: e.perms,
    ("DirectoryEntry", "child"): lambda e, v: v.node(e.target),
    ("Content", "length"): lambda c, v: c.length,
}

NAVIGATORS: dict[tuple[str, str], Navigator] = {
    **_BASE,
    **{
        (cls, "swhid"): (lambda n, v: str(n.id).encode("ascii"))
        for cls in ("Snapshot", "Release", "Revision", "Directory", "Content")
    },
}

OPERATIONS: dict[tuple[str, str], Navigator] = {
    ("Origin", "getLastSnapshot"): get_last_snapshot,
    ("SnapshotBranch", "getRevision"): get_revision,
}


def navigate(value: Any, name: str, view: ArchiveView) -> Any:
    """Read attribute `name` of a non-null runtime object."""
    return NAVIGATORS[(class_of(value), name)](value, view)


def call_builtin(value: Any, name: str, view: ArchiveView) -> Any:
    return OPERATIONS[(class_of(value), name)](value, view)
