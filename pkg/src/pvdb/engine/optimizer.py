"""Conjunction reordering by static cost.

Every chain of `and` operands, wherever it occurs, is flattened and stably
sorted by a static cost rank so that cheap tests run before expensive
ones:

1. iterator-free, call-free expressions such as attribute comparisons;
2. expressions with iterators other than `closure`;
3. expressions calling a recursive user-defined operation;
4. expressions containing a `closure`.

A call to a non-recursive user-defined operation costs what its body
costs. Operands of equal rank keep their relative order, so an already
ordered chain is returned unchanged.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Callable, Mapping

from loguru import logger

from pvdb.query.ast import (
    Binary,
    Expr,
    If,
    IteratorExp,
    Navigation,
    OperationCall,
    OperationDef,
    TypeOperation,
    Unary,
    walk,
)
from pvdb.query.typecheck import TypedQuery
from pvdb.query.types import BOOLEAN, ClassType, Metamodel

log = logger.bind(component="optimizer")

PLAIN, ITERATION, RECURSION, CLOSURE = 1, 2, 3, 4


def _callee(
    call: OperationCall, operations: Mapping[tuple[str, str], OperationDef], mm: Metamodel
) -> OperationDef | None:
    receiver = call.source.type if call.source is not None else None
    if call.arrow or not isinstance(receiver, ClassType):
        return None
    for ancestor in mm.ancestors(receiver.name):
        op = operations.get((ancestor, call.name))
        if op is not None:
            return op
    return None


def recursive_operations(query: TypedQuery) -> frozenset[tuple[str, str]]:
    """Keys of user-defined operations that can reach themselves through calls."""
    calls: dict[tuple[str, str], set[tuple[str, str]]] = {}
    for key, op in query.operations.items():
        calls[key] = {
            callee.key
            for node in walk(op.body)
            if isinstance(node, OperationCall)
            and (callee := _callee(node, query.operations, query.metamodel)) is not None
        }

    def reaches(start: tuple[str, str]) -> set[tuple[str, str]]:
        seen: set[tuple[str, str]] = set()
        stack = list(calls[start])
        while stack:
            key = stack.pop()
            if key not in seen:
                seen.add(key)
                stack.extend(calls[key])
        return seen

    return frozenset(key for key in calls if key in reaches(key))


class _Ranker:
    def __init__(self, query: TypedQuery) -> None:
        self.operations = query.operations
        self.mm = query.metamodel
        self.recursive = recursive_operations(query)
        self.bodies: dict[tuple[str, str], int] = {}

    def rank(self, e: Expr) -> int:
        cost = PLAIN
        for node in walk(e):
            match node:
                case IteratorExp(iterator="closure"):
                    return CLOSURE
                case IteratorExp():
                    cost = max(cost, ITERATION)
                case OperationCall():
                    callee = _callee(node, self.operations, self.mm)
                    if callee is not None:
                        cost = max(cost, self._op_rank(callee))
            if cost == CLOSURE:
                return cost
        return cost

    def _op_rank(self, op: OperationDef) -> int:
        if op.key in self.recursive:
            return CLOSURE if self._has_closure(op) else RECURSION
        if op.key not in self.bodies:
            self.bodies[op.key] = self.rank(op.body)
        return self.bodies[op.key]

    def _has_closure(self, op: OperationDef) -> bool:
        return any(isinstance(n, IteratorExp) and n.iterator == "closure" for n in walk(op.body))


def conjuncts(e: Expr) -> list[Expr]:
    """Operands of a (possibly nested) `and` chain, left to right."""
    if isinstance(e, Binary) and e.op == "and":
        return [*conjuncts(e.left), *conjuncts(e.right)]
    return [e]


def map_children(e: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Copy of `e` with `fn` applied to each direct sub-expression; types and positions kept."""
    replace = dataclasses.replace
    match e:
        case Navigation(source=source):
            return replace(e, source=fn(source))
        case OperationCall(source=source, args=args):
            return replace(
                e, source=fn(source) if source is not None else None, args=tuple(map(fn, args))
            )
        case TypeOperation(source=source) if source is not None:
            return replace(e, source=fn(source))
        case IteratorExp(source=source, body=body):
            return replace(e, source=fn(source), body=fn(body))
        case Unary(operand=operand):
            return replace(e, operand=fn(operand))
        case Binary(left=left, right=right):
            return replace(e, left=fn(left), right=fn(right))
        case If(condition=condition, then=then, otherwise=otherwise):
            return replace(e, condition=fn(condition), then=fn(then), otherwise=fn(otherwise))
    return e


class _Rewriter:
    def __init__(self, ranker: _Ranker) -> None:
        self.ranker = ranker
        self.reordered = 0

    def expr(self, e: Expr) -> Expr:
        if isinstance(e, Binary) and e.op == "and":
            parts = [self.expr(part) for part in conjuncts(e)]
            ranked = sorted(parts, key=self.ranker.rank)
            if [id(p) for p in ranked] != [id(p) for p in parts]:
                self.reordered += 1
            result = ranked[0]
            for part in ranked[1:]:
                result = Binary("and", result, part, e.pos, BOOLEAN)
            return result
        return map_children(e, self.expr)


def optimize(query: TypedQuery) -> TypedQuery:
    """Return `query` with every `and` chain reordered by static cost."""
    rewriter = _Rewriter(_Ranker(query))
    contexts = tuple(
        dataclasses.replace(
            ctx, defs=tuple(dataclasses.replace(op, body=rewriter.expr(op.body)) for op in ctx.defs)
        )
        for ctx in query.source.contexts
    )
    source = dataclasses.replace(query.source, contexts=contexts)
    log.debug("reordered {} conjunction chains", rewriter.reordered)
    return TypedQuery(source, {op.key: op for op in source.operations()}, query.metamodel)
