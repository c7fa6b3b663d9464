"""Brute-force reference interpreter.

A deliberately naive second implementation of FPQL semantics, used as an
oracle for the main evaluator: plain recursion, closure as a fixed point,
no optimizer, no memoisation, no tail calls, no per-origin fan-out and its
own attribute navigation. Only suitable for small archives.
"""

from __future__ import annotations

import sys
from typing import Any

from pvdb.engine.values import Collection, items_of
from pvdb.errors import NullComparisonError
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
from pvdb.query.ast import (
    Binary,
    BooleanLiteral,
    Expr,
    If,
    IntegerLiteral,
    IteratorExp,
    Navigation,
    NullLiteral,
    OperationCall,
    StringLiteral,
    TypeOperation,
    Unary,
    VariableRef,
)
from pvdb.query.typecheck import TypedQuery
from pvdb.query.types import CollectionType

RECURSION_LIMIT = 200_000

_CLASS_NAMES = (
    (ArchiveView, "Graph"),
    (Origin, "Origin"),
    (OriginVisit, "OriginVisit"),
    (Snapshot, "Snapshot"),
    (SnapshotBranch, "SnapshotBranch"),
    (Release, "Release"),
    (Revision, "Revision"),
    (Directory, "Directory"),
    (DirectoryEntry, "DirectoryEntry"),
    (Content, "Content"),
)


def _class_name(value: Any) -> str | None:
    for cls, name in _CLASS_NAMES:
        if isinstance(value, cls):
            return name
    return None


def _attribute(value: Any, name: str, view: ArchiveView) -> Any:
    if name == "swhid":
        return str(value.id).encode("ascii")
    match value, name:
        case ArchiveView(), "timestamp":
            return view.timestamp
        case ArchiveView(), "origins":
            return Collection("Set", list(view.origins.values()))
        case Origin(url=url), "url":
            return url.encode("utf-8")
        case Origin(visits=visits), "visits":
            return Collection("Sequence", [v for v in visits if v.timestamp <= view.timestamp])
        case OriginVisit(timestamp=ts), "timestamp":
            return ts
        case OriginVisit(snapshot=snp), "snapshot":
            return view.node(snp)
        case Snapshot(branches=branches), "branches":
            return Collection("Sequence", branches)
        case SnapshotBranch(), "name":
            return value.name
        case SnapshotBranch(target=target), "target":
            return view.node(target)
        case Release(), "name":
            return value.name.encode("utf-8")
        case Release(), ("message" | "timestamp"):
            return getattr(value, name)
        case Release(target=target), "target":
            return view.node(target)
        case Revision(tree=tree), "tree":
            return view.node(tree)
        case Revision(parents=parents), "parent":
            return view.node(parents[0]) if parents else None
        case Revision(parents=parents), "parents":
            return Collection("Sequence", [view.node(p) for p in parents])
        case Revision(), ("author" | "committer"):
            return getattr(value, name).encode("utf-8")
        case Revision(), "message":
            return value.message
        case Revision(), "authorTimestamp":
            return value.author_timestamp
        case Revision(), ("commiterTimestamp" | "committerTimestamp"):
            return value.committer_timestamp
        case Directory(entries=entries), "entries":
            return Collection("Sequence", entries)
        case DirectoryEntry(), ("name" | "perms"):
            return getattr(value, name)
        case DirectoryEntry(target=target), "child":
            return view.node(target)
        case Content(length=length), "length":
            return length
    raise AttributeError(f"{_class_name(value)} has no attribute {name!r}")


def _last_snapshot(origin: Origin, view: ArchiveView) -> Any:
    visits = [v for v in origin.visits if v.timestamp <= view.timestamp]
    if not visits:
        return None
    latest = max(visits, key=lambda v: v.timestamp)
    node = view.node(latest.snapshot)
    return node if isinstance(node, Snapshot) else None


def _revision(branch: SnapshotBranch, view: ArchiveView) -> Any:
    node = view.node(branch.target)
    if isinstance(node, Release):
        return _revision(SnapshotBranch(branch.name, node.target), view)
    return node if isinstance(node, Revision) else None


class ReferenceInterpreter:
    def __init__(self, query: TypedQuery, view: ArchiveView) -> None:
        self.query = query
        self.mm = query.metamodel
        self.view = view

    def _null(self, e: Expr, detail: str) -> NullComparisonError:
        return NullComparisonError(e.pos.line, e.pos.column, detail)

    def _bool(self, e: Expr, env: dict[str, Any]) -> bool:
        value = self.eval(e, env)
        if value is None:
            raise self._null(e, "Boolean operand is null")
        return value

    def _int(self, e: Expr, env: dict[str, Any]) -> int:
        value = self.eval(e, env)
        if value is None:
            raise self._null(e, "Integer operand is null")
        return value

    def eval(self, e: Expr, env: dict[str, Any]) -> Any:
        match e:
            case IntegerLiteral() | BooleanLiteral():
                return e.value
            case StringLiteral():
                return e.value.encode("utf-8")
            case NullLiteral():
                return None
            case VariableRef():
                return env[e.name]
            case Navigation():
                source = self.eval(e.source, env)
                return None if source is None else _attribute(source, e.name, self.view)
            case OperationCall():
                return self._call(e, env)
            case TypeOperation():
                value = self.eval(e.source, env) if e.source is not None else env["self"]
                name = _class_name(value)
                ok = name is not None and e.target.name in self.mm.ancestors(name)
                if e.is_cast:
                    return value if ok else None
                return ok
            case IteratorExp():
                return self._iterate(e, env)
            case Unary(op="not"):
                return not self._bool(e.operand, env)
            case Unary():
                return -self._int(e.operand, env)
            case Binary(op="and"):
                return self._bool(e.left, env) and self._bool(e.right, env)
            case Binary(op="or"):
                return self._bool(e.left, env) or self._bool(e.right, env)
            case Binary(op="="):
                return self.eval(e.left, env) == self.eval(e.right, env)
            case Binary(op="<>"):
                return self.eval(e.left, env) != self.eval(e.right, env)
            case Binary(op="+"):
                return self._int(e.left, env) + self._int(e.right, env)
            case Binary(op="-"):
                return self._int(e.left, env) - self._int(e.right, env)
            case Binary():
                left, right = self.eval(e.left, env), self.eval(e.right, env)
                if left is None or right is None:
                    raise self._null(e, f"'{e.op}' compares null")
                if e.op == "<":
                    return left < right
                if e.op == "<=":
                    return left <= right
                if e.op == ">":
                    return left > right
                return left >= right
            case If():
                return self.eval(e.then if self._bool(e.condition, env) else e.otherwise, env)
        raise TypeError(f"cannot evaluate {e!r}")

    def _call(self, e: OperationCall, env: dict[str, Any]) -> Any:
        receiver = self.eval(e.source, env) if e.source is not None else env["self"]
        if e.arrow or (e.name == "oclAsSet" and isinstance(receiver, Collection)):
            items = items_of(receiver)
            if e.name == "size":
                return len(items)
            if e.name in ("isEmpty", "notEmpty"):
                return (len(items) == 0) == (e.name == "isEmpty")
            if e.name in ("includes", "excludes"):
                return (self.eval(e.args[0], env) in items) == (e.name == "includes")
            return Collection("Set", items)
        if e.name == "oclAsSet":
            return Collection("Set", [] if receiver is None else [receiver])
        if receiver is None:
            return None
        args = [self.eval(a, env) for a in e.args]
        if e.name == "getLastSnapshot" and isinstance(receiver, Origin):
            return _last_snapshot(receiver, self.view)
        if e.name == "getRevision" and isinstance(receiver, SnapshotBranch):
            return _revision(receiver, self.view)
        for ancestor in self.mm.ancestors(_class_name(receiver) or ""):
            op = self.query.operations.get((ancestor, e.name))
            if op is not None:
                scope = {"self": receiver} | {p.name: a for p, a in zip(op.params, args, strict=True)}
                return self.eval(op.body, scope)
        raise AttributeError(f"no operation {e.name!r} on {receiver!r}")

    def _iterate(self, e: IteratorExp, env: dict[str, Any]) -> Any:
        items = list(items_of(self.eval(e.source, env)))

        def body(x: Any) -> Any:
            return self.eval(e.body, {**env, e.var: x})  # type: ignore[dict-item]

        def test(x: Any) -> bool:
            value = body(x)
            if value is None:
                raise self._null(e.body, f"{e.iterator} body is null")
            return value

        kind = e.type.kind if isinstance(e.type, CollectionType) else "Set"
        if e.iterator == "select":
            return Collection(kind, [x for x in items if test(x)])
        if e.iterator == "reject":
            return Collection(kind, [x for x in items if not test(x)])
        if e.iterator == "exists":
            for x in items:
                if test(x):
                    return True
            return False
        if e.iterator == "forAll":
            for x in items:
                if not test(x):
                    return False
            return True
        if e.iterator == "collect":
            out: list[Any] = []
            for x in items:
                value = body(x)
                out.extend(value.items if isinstance(value, Collection) else [value])
            return Collection(kind, out)
        # closure: apply the body level by level until a level adds nothing new
        result = dict.fromkeys(items)
        level = list(result)
        while level:
            found = [y for x in level for y in items_of(body(x)) if y not in result]
            level = list(dict.fromkeys(found))
            result.update(dict.fromkeys(level))
        return Collection("Set", result)


def reference_select(query: TypedQuery, view: ArchiveView) -> tuple[str, ...]:
    """Urls selected by the document's `query`, sorted bytewise, computed naively.

    User-defined operations recurse on the host stack here, so the recursion
    limit is raised to `RECURSION_LIMIT` for the duration of the call.
    """
    interpreter = ReferenceInterpreter(query, view)
    previous = sys.getrecursionlimit()
    sys.setrecursionlimit(max(previous, RECURSION_LIMIT))
    try:
        selected = interpreter.eval(query.query.body, {"self": view})
    finally:
        sys.setrecursionlimit(previous)
    return tuple(sorted((o.url for o in items_of(selected)), key=lambda u: u.encode("utf-8")))
