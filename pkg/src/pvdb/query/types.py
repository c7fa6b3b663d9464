"""Static types and the fixed archive metamodel.

The metamodel is the class table queries are checked against: `Graph` with
its origins, the crawl records (`Origin`, `OriginVisit`), the `Node`
hierarchy of the Merkle DAG and the two compound records `SnapshotBranch`
and `DirectoryEntry`. It is closed: queries may only add operations to
existing classes.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

COLLECTION_KINDS = ("Set", "Sequence", "Bag")
PRIMITIVES = ("Integer", "String", "Boolean")


@dataclass(frozen=True, slots=True)
class PrimitiveType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class ClassType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class NullType:
    """Type of the `null` literal; conforms to every type."""

    def __str__(self) -> str:
        return "OclVoid"


@dataclass(frozen=True, slots=True)
class CollectionType:
    kind: str
    element: FpqlType

    def __str__(self) -> str:
        return f"{self.kind}({self.element})"


type FpqlType = PrimitiveType | ClassType | NullType | CollectionType

INTEGER = PrimitiveType("Integer")
STRING = PrimitiveType("String")
BOOLEAN = PrimitiveType("Boolean")
NULL = NullType()


def set_of(element: FpqlType) -> CollectionType:
    return CollectionType("Set", element)


def seq_of(element: FpqlType) -> CollectionType:
    return CollectionType("Sequence", element)


@dataclass(frozen=True, slots=True)
class OperationSig:
    name: str
    params: tuple[tuple[str, FpqlType], ...]
    result: FpqlType
    builtin: bool = True


@dataclass(frozen=True, slots=True)
class ClassDef:
    name: str
    supertype: str | None
    attributes: Mapping[str, FpqlType] = field(default_factory=dict)
    operations: Mapping[str, OperationSig] = field(default_factory=dict)
    abstract: bool = False


def _cls(
    name: str,
    supertype: str | None = None,
    *,
    abstract: bool = False,
    operations: tuple[OperationSig, ...] = (),
    **attributes: FpqlType,
) -> ClassDef:
    return ClassDef(
        name,
        supertype,
        MappingProxyType(attributes),
        MappingProxyType({op.name: op for op in operations}),
        abstract,
    )


class Metamodel:
    """Immutable class table with conformance and member lookup."""

    def __init__(self, classes: tuple[ClassDef, ...]) -> None:
        self._classes: Mapping[str, ClassDef] = MappingProxyType({c.name: c for c in classes})

    @property
    def classes(self) -> Mapping[str, ClassDef]:
        return self._classes

    def ancestors(self, name: str) -> tuple[str, ...]:
        """`name` followed by its supertypes, nearest first."""
        chain: list[str] = []
        current: str | None = name
        while current is not None:
            chain.append(current)
            current = self._classes[current].supertype
        return tuple(chain)

    def is_subclass(self, name: str, ancestor: str) -> bool:
        return ancestor in self.ancestors(name)

    def resolve(self, name: str, collection: str | None = None) -> FpqlType | None:
        """Type named by a written spec, or None when the name is unknown."""
        if name in PRIMITIVES:
            base: FpqlType = PrimitiveType(name)
        elif name in self._classes:
            base = ClassType(name)
        else:
            return None
        if collection is None:
            return base
        if collection not in COLLECTION_KINDS:
            return None
        return CollectionType(collection, base)

    def conforms(self, actual: FpqlType, expected: FpqlType) -> bool:
        """True if a value of static type `actual` may be used where `expected` is required."""
        match actual, expected:
            case NullType(), _:
                return True
            case PrimitiveType(), PrimitiveType():
                return actual == expected
            case ClassType(name=a), ClassType(name=e):
                return self.is_subclass(a, e)
            case CollectionType(), CollectionType():
                return actual.kind == expected.kind and self.conforms(actual.element, expected.element)
        return False

    def comparable(self, left: FpqlType, right: FpqlType) -> bool:
        """Whether `=` / `<>` between the two types is meaningful."""
        return self.conforms(left, right) or self.conforms(right, left)

    def join(self, left: FpqlType, right: FpqlType) -> FpqlType | None:
        """Least common supertype, or None when the types are unrelated."""
        if self.conforms(left, right):
            return right
        if self.conforms(right, left):
            return left
        match left, right:
            case ClassType(name=a), ClassType(name=b):
                others = set(self.ancestors(b))
                for candidate in self.ancestors(a):
                    if candidate in others:
                        return ClassType(candidate)
            case CollectionType(), CollectionType() if left.kind == right.kind:
                element = self.join(left.element, right.element)
                if element is not None:
                    return CollectionType(left.kind, element)
        return None

    def members(self, class_name: str) -> dict[str, FpqlType | OperationSig]:
        """Attributes and built-in operations visible on `class_name`, inherited ones included."""
        found: dict[str, FpqlType | OperationSig] = {}
        for name in reversed(self.ancestors(class_name)):
            cls = self._classes[name]
            found.update(cls.attributes)
            found.update(cls.operations)
        return found

    def attribute(self, class_name: str, name: str) -> FpqlType | None:
        member = self.members(class_name).get(name)
        return None if isinstance(member, OperationSig) else member

    def operation(self, class_name: str, name: str) -> OperationSig | None:
        member = self.members(class_name).get(name)
        return member if isinstance(member, OperationSig) else None


def _archive_metamodel() -> Metamodel:
    node = ClassType("Node")
    revision = ClassType("Revision")
    return Metamodel(
        (
            _cls("Graph", timestamp=INTEGER, origins=set_of(ClassType("Origin"))),
            _cls(
                "Origin",
                operations=(OperationSig("getLastSnapshot", (), ClassType("Snapshot")),),
                url=STRING,
                visits=seq_of(ClassType("OriginVisit")),
            ),
            _cls("OriginVisit", timestamp=INTEGER, snapshot=ClassType("Snapshot")),
            _cls("Node", abstract=True, swhid=STRING),
            _cls("Snapshot", "Node", branches=seq_of(ClassType("SnapshotBranch"))),
            _cls(
                "SnapshotBranch",
                operations=(OperationSig("getRevision", (), revision),),
                name=STRING,
                target=node,
            ),
            _cls("Release", "Node", name=STRING, message=STRING, timestamp=INTEGER, target=node),
            _cls(
                "Revision",
                "Node",
                tree=ClassType("Directory"),
                parent=revision,
                parents=seq_of(revision),
                author=STRING,
                committer=STRING,
                message=STRING,
                authorTimestamp=INTEGER,
                commiterTimestamp=INTEGER,
                committerTimestamp=INTEGER,
            ),
            _cls("Directory", "Node", entries=seq_of(ClassType("DirectoryEntry"))),
            _cls("DirectoryEntry", name=STRING, perms=INTEGER, child=node),
            _cls("Content", "Node", length=INTEGER),
        )
    )


METAMODEL = _archive_metamodel()


def element_type(t: FpqlType) -> FpqlType:
    """Element type of a collection; a scalar is its own element type."""
    return t.element if isinstance(t, CollectionType) else t
