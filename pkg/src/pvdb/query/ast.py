"""FPQL syntax tree.

Nodes are frozen dataclasses. Source positions and static types are carried
on every expression but excluded from equality, so a tree compares equal to
the tree obtained by printing and re-parsing it.

The parser produces *untyped* trees: bare names are `Identifier` nodes and
bare calls are `OperationCall` nodes without a source. The typechecker
returns a *typed* tree in which every expression has its `type` set, bare
names are resolved to variables or to navigations from an implicit
receiver, and iterators without a declared variable get a generated one.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from pvdb.query.types import FpqlType


@dataclass(frozen=True, slots=True, order=True)
class Pos:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


NO_POS = Pos(0, 0)

ITERATORS = frozenset({"select", "reject", "exists", "forAll", "collect", "closure"})
TYPE_OPERATIONS = frozenset({"oclIsKindOf", "isKindOf", "oclAsType", "asType"})


@dataclass(frozen=True, slots=True)
class TypeSpec:
    """A written type: `Integer`, `Revision`, `Set(Origin)`..."""

    name: str
    collection: str | None = None
    pos: Pos = field(default=NO_POS, compare=False)

    def __str__(self) -> str:
        return f"{self.collection}({self.name})" if self.collection else self.name


# --------------------------------------------------------------------------------------------------
# Expressions
# --------------------------------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class IntegerLiteral:
    value: int
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class StringLiteral:
    value: str
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class BooleanLiteral:
    value: bool
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class NullLiteral:
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class Identifier:
    """Bare name in an untyped tree; resolved away by the typechecker."""

    name: str
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class VariableRef:
    """`self`, a parameter or an iterator variable.

    `implicit` marks references the typechecker inserted for an implicit
    receiver; the printer leaves them out.
    """

    name: str
    implicit: bool = False
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class Navigation:
    """`source.name` attribute or reference navigation."""

    source: Expr
    name: str
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class OperationCall:
    """`source.name(args)`, `source->name(args)` or a bare `name(args)` (source None)."""

    source: Expr | None
    name: str
    args: tuple[Expr, ...] = ()
    arrow: bool = False
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class TypeOperation:
    """`source.oclIsKindOf(T)` / `source.oclAsType(T)` and their short spellings."""

    source: Expr | None
    name: str
    target: TypeSpec
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)

    @property
    def is_cast(self) -> bool:
        return self.name in ("oclAsType", "asType")


@dataclass(frozen=True, slots=True)
class IteratorExp:
    """`source->iterator(var : T | body)`; `var` is None until typechecked when omitted."""

    source: Expr
    iterator: str
    var: str | None
    var_type: TypeSpec | None
    body: Expr
    implicit_var: bool = False
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class Unary:
    op: str
    operand: Expr
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class Binary:
    op: str
    left: Expr
    right: Expr
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class If:
    condition: Expr
    then: Expr
    otherwise: Expr
    pos: Pos = field(default=NO_POS, compare=False)
    type: FpqlType | None = field(default=None, compare=False)


type Expr = (
    IntegerLiteral
    | StringLiteral
    | BooleanLiteral
    | NullLiteral
    | Identifier
    | VariableRef
    | Navigation
    | OperationCall
    | TypeOperation
    | IteratorExp
    | Unary
    | Binary
    | If
)


# --------------------------------------------------------------------------------------------------
# Definitions
# --------------------------------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Param:
    name: str
    type: TypeSpec
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True, slots=True)
class OperationDef:
    """`def : name(params) : Result = body` inside a context block."""

    context: str
    name: str
    params: tuple[Param, ...]
    result: TypeSpec
    body: Expr
    pos: Pos = field(default=NO_POS, compare=False)

    @property
    def key(self) -> tuple[str, str]:
        return (self.context, self.name)


@dataclass(frozen=True, slots=True)
class ContextDef:
    type_name: str
    defs: tuple[OperationDef, ...]
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True, slots=True)
class Import:
    alias: str
    uri: str


@dataclass(frozen=True, slots=True)
class QueryFile:
    """A parsed query document; `imports` and `package` are kept for printing only."""

    contexts: tuple[ContextDef, ...]
    imports: tuple[Import, ...] = ()
    package: str | None = None

    def operations(self) -> tuple[OperationDef, ...]:
        return tuple(d for ctx in self.contexts for d in ctx.defs)


def children(expr: Expr) -> tuple[Expr, ...]:
    """Direct sub-expressions of `expr` in evaluation order."""
    match expr:
        case Navigation(source=source):
            return (source,)
        case OperationCall(source=source, args=args):
            return ((source, *args) if source is not None else args)
        case TypeOperation(source=source):
            return (source,) if source is not None else ()
        case IteratorExp(source=source, body=body):
            return (source, body)
        case Unary(operand=operand):
            return (operand,)
        case Binary(left=left, right=right):
            return (left, right)
        case If(condition=c, then=t, otherwise=o):
            return (c, t, o)
    return ()


def walk(expr: Expr) -> Iterator[Expr]:
    """Yield `expr` and all its sub-expressions, depth first."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))
