"""Interpreter for typed FPQL trees over an archive view.

One `Evaluator` serves one task (normally one origin) and owns that task's
memo table and budget counters; nothing mutable is shared between tasks.
Calls to user-defined operations in tail position are returned as
`_TailCall` markers and run by a trampoline loop, so linear recursion such
as walking to the root of a long revision chain uses constant host stack.
"""

from __future__ import annotations

import operator
import sys
import time
from collections import deque
from collections.abc import Callable, MutableMapping
from dataclasses import dataclass
from typing import Any

from loguru import logger

from pvdb.engine.builtins import call_builtin, class_of, navigate
from pvdb.engine.values import Collection, items_of
from pvdb.errors import BudgetExceededError, ClosureCycleError, NullComparisonError
from pvdb.models.archive import ArchiveView, Origin
from pvdb.models.fingerprint import EvalBudget
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
    OperationDef,
    StringLiteral,
    TypeOperation,
    Unary,
    VariableRef,
)
from pvdb.query.typecheck import TypedQuery
from pvdb.query.types import CollectionType
from pvdb.utils.parallel import map_ordered

log = logger.bind(component="engine")

_MISSING = object()
_TIME_CHECK_MASK = 0xFFF

_ORDERING: dict[str, Callable[[Any, Any], bool]] = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}

type Env = MutableMapping[str, Any]


@dataclass(frozen=True, slots=True)
class _TailCall:
    op: OperationDef
    receiver: Any
    args: tuple[Any, ...]

    @property
    def key(self) -> tuple[object, ...]:
        return (self.op.key, self.receiver, self.args)


def _url_key(origin: Origin) -> bytes:
    return origin.url.encode("utf-8")


class Evaluator:
    """Evaluates expressions of one typed document against one view.

    Args:
        query: The typechecked document whose operations may be called.
        view: The archive as of the fingerprint time.
        budget: Limits for this evaluator; the node and time limits cover its
            whole life, the depth limit the deepest chain of calls.
        origin: Url of the origin under evaluation, for error messages.

    """

    def __init__(
        self, query: TypedQuery, view: ArchiveView, budget: EvalBudget, origin: str | None = None
    ) -> None:
        self.operations = query.operations
        self.metamodel = query.metamodel
        self.view = view
        self.budget = budget
        self.origin = origin
        self.memo: dict[tuple[object, ...], Any] = {}
        self.depth = 0
        self.visits = 0
        self._deadline = (
            time.monotonic() + budget.max_seconds if budget.max_seconds is not None else None
        )
        self._user_ops: dict[tuple[str | None, str], OperationDef | None] = {}

    # -- entry points --------------------------------------------------------------------------------

    def run(self, expr: Expr, env: Env) -> Any:
        """Evaluate `expr`; host stack exhaustion is reported as a budget error."""
        try:
            return self.eval(expr, env)
        except RecursionError:
            raise BudgetExceededError("host-stack", sys.getrecursionlimit(), self.origin) from None

    def holds(self, expr: Expr, env: Env) -> bool:
        """Evaluate a Boolean predicate; null is an error, not false."""
        try:
            return self._truth(expr, env, "selection predicate")
        except RecursionError:
            raise BudgetExceededError("host-stack", sys.getrecursionlimit(), self.origin) from None

    # -- budget --------------------------------------------------------------------------------------

    def _tick(self) -> None:
        self.visits += 1
        if self.visits > self.budget.max_nodes:
            raise BudgetExceededError("node-visit", self.budget.max_nodes, self.origin)
        if (
            self._deadline is not None
            and not self.visits & _TIME_CHECK_MASK
            and time.monotonic() > self._deadline
        ):
            raise BudgetExceededError("wall-clock", f"{self.budget.max_seconds}s", self.origin)

    # -- expressions ---------------------------------------------------------------------------------

    def eval(self, e: Expr, env: Env) -> Any:
        match e:
            case IntegerLiteral(value=value) | BooleanLiteral(value=value):
                return value
            case StringLiteral(value=value):
                return value.encode("utf-8")
            case NullLiteral():
                return None
            case VariableRef(name=name):
                return env[name]
            case Navigation(source=source, name=name):
                value = self.eval(source, env)
                if value is None:
                    return None
                self._tick()
                return navigate(value, name, self.view)
            case OperationCall():
                result = self._call(e, env)
                return self._trampoline(result) if isinstance(result, _TailCall) else result
            case TypeOperation(source=source, target=target):
                value = self.eval(source, env) if source is not None else env["self"]
                cls = class_of(value)
                ok = cls is not None and self.metamodel.is_subclass(cls, target.name)
                if e.is_cast:
                    return value if ok else None
                return ok
            case IteratorExp():
                return self._iterate(e, env)
            case Unary(op="not", operand=operand):
                return not self._truth(operand, env, "operand of 'not'")
            case Unary(operand=operand):
                return -self._number(operand, env, "operand of unary '-'")
            case Binary():
                return self._binary(e, env)
            case If(condition=condition, then=then, otherwise=otherwise):
                branch = then if self._truth(condition, env, "if condition") else otherwise
                return self.eval(branch, env)
        raise TypeError(f"cannot evaluate {e!r}")

    def _null_error(self, e: Expr, detail: str) -> NullComparisonError:
        return NullComparisonError(e.pos.line, e.pos.column, detail)

    def _truth(self, e: Expr, env: Env, what: str) -> bool:
        value = self.eval(e, env)
        if value is None:
            raise self._null_error(e, f"{what} is null")
        return value

    def _number(self, e: Expr, env: Env, what: str) -> int:
        value = self.eval(e, env)
        if value is None:
            raise self._null_error(e, f"{what} is null")
        return value

    def _binary(self, e: Binary, env: Env) -> Any:
        match e.op:
            case "and":
                return self._truth(e.left, env, "left operand of 'and'") and self._truth(
                    e.right, env, "right operand of 'and'"
                )
            case "or":
                return self._truth(e.left, env, "left operand of 'or'") or self._truth(
                    e.right, env, "right operand of 'or'"
                )
            case "=":
                return self.eval(e.left, env) == self.eval(e.right, env)
            case "<>":
                return self.eval(e.left, env) != self.eval(e.right, env)
            case "+":
                return self._number(e.left, env, "left operand of '+'") + self._number(
                    e.right, env, "right operand of '+'"
                )
            case "-":
                return self._number(e.left, env, "left operand of '-'") - self._number(
                    e.right, env, "right operand of '-'"
                )
        left = self.eval(e.left, env)
        right = self.eval(e.right, env)
        if left is None or right is None:
            raise self._null_error(e, f"'{e.op}' compares null")
        return _ORDERING[e.op](left, right)

    # -- calls ---------------------------------------------------------------------------------------

    def _user_op(self, class_name: str | None, name: str) -> OperationDef | None:
        key = (class_name, name)
        if key not in self._user_ops:
            found = None
            if class_name is not None:
                for ancestor in self.metamodel.ancestors(class_name):
                    found = self.operations.get((ancestor, name))
                    if found is not None:
                        break
            self._user_ops[key] = found
        return self._user_ops[key]

    def _call(self, e: OperationCall, env: Env) -> Any:
        """One call step; user-defined operations come back as `_TailCall`."""
        receiver = self.eval(e.source, env) if e.source is not None else env["self"]
        if e.arrow or (e.name == "oclAsSet" and isinstance(receiver, Collection)):
            return self._collection_op(e, receiver, env)
        if e.name == "oclAsSet":
            return Collection("Set", items_of(receiver))
        if receiver is None:
            return None
        args = tuple(self.eval(a, env) for a in e.args)
        op = self._user_op(class_of(receiver), e.name)
        if op is None:
            self._tick()
            return call_builtin(receiver, e.name, self.view)
        return _TailCall(op, receiver, args)

    def _tail(self, e: Expr, env: Env) -> Any:
        """Evaluate `e` in tail position: a final user call is returned, not run."""
        while isinstance(e, If):
            e = e.then if self._truth(e.condition, env, "if condition") else e.otherwise
        if isinstance(e, OperationCall):
            return self._call(e, env)
        return self.eval(e, env)

    def _trampoline(self, call: _TailCall) -> Any:
        outer = self.depth
        chain: list[tuple[object, ...]] = []
        try:
            while True:
                key = call.key
                result = self.memo.get(key, _MISSING)
                if result is not _MISSING:
                    break
                chain.append(key)
                self.depth += 1
                if self.depth > self.budget.max_depth:
                    raise BudgetExceededError("recursion-depth", self.budget.max_depth, self.origin)
                self._tick()
                env: dict[str, Any] = {"self": call.receiver}
                env.update(zip((p.name for p in call.op.params), call.args, strict=True))
                result = self._tail(call.op.body, env)
                if not isinstance(result, _TailCall):
                    break
                call = result
        finally:
            self.depth = outer
        for key in chain:
            self.memo[key] = result
        return result

    def _collection_op(self, e: OperationCall, receiver: Any, env: Env) -> Any:
        items = items_of(receiver)
        match e.name:
            case "size":
                return len(items)
            case "isEmpty":
                return not items
            case "notEmpty":
                return bool(items)
            case "includes":
                return self.eval(e.args[0], env) in items
            case "excludes":
                return self.eval(e.args[0], env) not in items
            case "asSet" | "oclAsSet":
                return Collection("Set", items)
        raise TypeError(f"unknown collection operation {e.name!r}")

    # -- iterators -----------------------------------------------------------------------------------

    def _iterate(self, e: IteratorExp, env: Env) -> Any:
        items = items_of(self.eval(e.source, env))
        var = e.var
        assert var is not None, "iterator variables are bound by the typechecker"
        saved = env.get(var, _MISSING)
        try:
            match e.iterator:
                case "select" | "reject":
                    keep = e.iterator == "select"
                    chosen = [x for x in items if self._test(e, env, x) is keep]
                    kind = e.type.kind if isinstance(e.type, CollectionType) else "Set"
                    return Collection(kind, chosen)
                case "exists":
                    return any(self._test(e, env, x) for x in items)
                case "forAll":
                    return all(self._test(e, env, x) for x in items)
                case "collect":
                    out: list[Any] = []
                    for x in items:
                        value = self._apply(e, env, x)
                        if isinstance(value, Collection):
                            out.extend(value.items)
                        else:
                            out.append(value)
                    kind = e.type.kind if isinstance(e.type, CollectionType) else "Bag"
                    return Collection(kind, out)
                case "closure":
                    return self._closure(e, env, items)
            raise TypeError(f"unknown iterator {e.iterator!r}")
        finally:
            if saved is _MISSING:
                env.pop(var, None)
            else:
                env[var] = saved

    def _apply(self, e: IteratorExp, env: Env, element: Any) -> Any:
        self._tick()
        env[e.var] = element  # type: ignore[index]
        return self.eval(e.body, env)

    def _test(self, e: IteratorExp, env: Env, element: Any) -> bool:
        value = self._apply(e, env, element)
        if value is None:
            raise self._null_error(e.body, f"{e.iterator} body is null")
        return value

    def _closure(self, e: IteratorExp, env: Env, seeds: tuple[Any, ...]) -> Collection:
        """Reflexive-transitive closure by breadth-first worklist.

        A revisit is an ordinary visited-set hit, except on a single-seed walk
        whose body only follows stored references from the element (such as
        `closure(parent)`): that walk is a chain through the archive, so
        meeting an element twice means the archive contains a cycle.
        """
        seen: dict[Any, None] = dict.fromkeys(seeds)
        chain = len(seen) == 1 and _follows_references(e)
        work = deque(seen)
        while work:
            for found in items_of(self._apply(e, env, work.popleft())):
                if found in seen:
                    if chain:
                        raise ClosureCycleError(f"closure at {e.pos} revisits {found!r}")
                    continue
                seen[found] = None
                work.append(found)
        return Collection("Set", seen)


def _follows_references(e: IteratorExp) -> bool:
    """True when the body is a scalar navigation path starting at the iterator variable."""
    if isinstance(e.body.type, CollectionType) or not isinstance(e.body, Navigation):
        return False
    step: Expr = e.body
    while isinstance(step, Navigation):
        step = step.source
    return isinstance(step, VariableRef) and step.name == e.var


# --------------------------------------------------------------------------------------------------
# Query evaluation
# --------------------------------------------------------------------------------------------------


def per_origin_predicate(body: Expr) -> tuple[str, Expr] | None:
    """Split `self.origins->select(v | p)` into (v, p); None for any other shape."""
    match body:
        case IteratorExp(
            iterator="select",
            source=Navigation(source=VariableRef(name="self"), name="origins"),
            var=var,
            body=predicate,
        ) if var is not None:
            return var, predicate
    return None


def evaluate(
    query: TypedQuery,
    view: ArchiveView,
    budget: EvalBudget | None = None,
    *,
    threads: int | None = None,
) -> tuple[Origin, ...]:
    """Origins of `view` selected by the document's `query` operation.

    Bodies of the form `origins->select(p)` are evaluated one task per
    origin, fanned out over `threads` workers; anything else runs as a
    single task. The result is sorted bytewise by UTF-8 url.

    Raises:
        BudgetExceededError: A task ran out of budget; names the origin.
        NullComparisonError: Null reached a Boolean, ordering or arithmetic operator.
        ClosureCycleError: A closure chain loops.

    """
    budget = budget or EvalBudget.from_settings()
    body = query.query.body
    split = per_origin_predicate(body)
    if split is None:
        log.debug("evaluating query body as a single task")
        result = Evaluator(query, view, budget).run(body, {"self": view})
        return tuple(sorted(items_of(result), key=_url_key))

    var, predicate = split
    universe = sorted(view.origins.values(), key=_url_key)

    def check(origin: Origin) -> bool:
        return Evaluator(query, view, budget, origin.url).holds(predicate, {"self": view, var: origin})

    keep = map_ordered(check, universe, threads=threads, desc="evaluating origins")
    selected = tuple(o for o, k in zip(universe, keep, strict=True) if k)
    log.info("selected {} of {} origins at t={}", len(selected), len(universe), view.timestamp)
    return selected
