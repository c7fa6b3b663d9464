"""Static typing of FPQL trees against the archive metamodel.

`typecheck` returns a typed copy of the tree: every expression carries its
static type, bare names are resolved, and operation calls are checked
against built-in signatures and the user-defined operations of the
document. Resolution of a bare name `x` (or call `x(...)`):

1. `self`, operation parameters and explicitly declared iterator variables;
2. the implicit iterator variables, innermost first, whose type has a
   member `x`;
3. a member `x` of the context type (`self.x`).

User-defined operation signatures are collected before any body is
checked, so definition order never matters and recursion is allowed.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Mapping
from dataclasses import dataclass, field

from Levenshtein import ratio
from loguru import logger

from pvdb.errors import FpqlTypeError
from pvdb.query.ast import (
    Binary,
    BooleanLiteral,
    Expr,
    Identifier,
    If,
    IntegerLiteral,
    IteratorExp,
    Navigation,
    NullLiteral,
    OperationCall,
    OperationDef,
    Pos,
    QueryFile,
    StringLiteral,
    TypeOperation,
    TypeSpec,
    Unary,
    VariableRef,
)
from pvdb.query.types import (
    BOOLEAN,
    INTEGER,
    METAMODEL,
    NULL,
    STRING,
    ClassType,
    CollectionType,
    FpqlType,
    Metamodel,
    NullType,
    PrimitiveType,
    element_type,
    set_of,
)

QUERY_OPERATION = "query"
QUERY_CONTEXT = "Graph"
QUERY_RESULT = set_of(ClassType("Origin"))

SUGGESTION_THRESHOLD = 0.6

COLLECTION_OPERATIONS = frozenset(
    {"size", "isEmpty", "notEmpty", "includes", "excludes", "asSet", "oclAsSet"}
)
ORDERING_OPERATORS = frozenset({"<", "<=", ">", ">="})

log = logger.bind(component="typecheck")


@dataclass(frozen=True, slots=True)
class TypedQuery:
    """A typechecked document and its user-defined operations by (context, name)."""

    source: QueryFile
    operations: Mapping[tuple[str, str], OperationDef]
    metamodel: Metamodel = field(default=METAMODEL, compare=False)

    @property
    def query(self) -> OperationDef:
        return self.operations[(QUERY_CONTEXT, QUERY_OPERATION)]


def suggest(name: str, candidates: list[str]) -> str | None:
    """Closest candidate by Levenshtein ratio, if it is close enough."""
    scored = sorted(((ratio(name, c), c) for c in candidates), key=lambda s: (-s[0], s[1]))
    if scored and scored[0][0] >= SUGGESTION_THRESHOLD:
        return scored[0][1]
    return None


@dataclass(frozen=True, slots=True)
class _Var:
    name: str
    type: FpqlType
    implicit: bool = False


class _Checker:
    def __init__(self, document: QueryFile, metamodel: Metamodel) -> None:
        self.document = document
        self.mm = metamodel
        self.user_ops: dict[tuple[str, str], OperationDef] = {}
        self.counter = 0

    # -- errors --------------------------------------------------------------------------------------

    def _error(self, pos: Pos, detail: str) -> FpqlTypeError:
        return FpqlTypeError(pos.line, pos.column, detail)

    def _unknown_member(self, pos: Pos, owner: str, name: str, available: list[str]) -> FpqlTypeError:
        detail = f"{owner} has no attribute or operation '{name}'"
        best = suggest(name, available)
        if best is not None:
            detail += f"; did you mean '{best}'?"
        if available:
            detail += f" (it has: {', '.join(sorted(available))})"
        return self._error(pos, detail)

    def _resolve(self, spec: TypeSpec) -> FpqlType:
        resolved = self.mm.resolve(spec.name, spec.collection)
        if resolved is None:
            known = [*self.mm.classes, "Integer", "String", "Boolean"]
            best = suggest(spec.name, known)
            hint = f"; did you mean '{best}'?" if best else ""
            raise self._error(spec.pos, f"unknown type '{spec}'{hint}")
        return resolved

    # -- document ------------------------------------------------------------------------------------

    def _members_of(self, class_name: str) -> list[str]:
        names = set(self.mm.members(class_name))
        for context, name in self.user_ops:
            if self.mm.is_subclass(class_name, context):
                names.add(name)
        return sorted(names)

    def collect_signatures(self) -> None:
        for ctx in self.document.contexts:
            if ctx.type_name not in self.mm.classes:
                raise self._error(ctx.pos, f"unknown context type '{ctx.type_name}'")
            for op in ctx.defs:
                if op.name in self.mm.members(ctx.type_name):
                    raise self._error(op.pos, f"'{op.name}' is already a member of {ctx.type_name}")
                for (other_ctx, other_name), other in self.user_ops.items():
                    related = self.mm.is_subclass(ctx.type_name, other_ctx) or self.mm.is_subclass(
                        other_ctx, ctx.type_name
                    )
                    if other_name == op.name and related:
                        raise self._error(
                            op.pos,
                            f"operation '{op.name}' on {ctx.type_name} is already defined on "
                            f"{other_ctx} (line {other.pos.line})",
                        )
                names = [p.name for p in op.params]
                if len(set(names)) != len(names) or "self" in names:
                    raise self._error(op.pos, f"duplicate or reserved parameter name in '{op.name}'")
                for p in op.params:
                    self._resolve(p.type)
                self._resolve(op.result)
                self.user_ops[(ctx.type_name, op.name)] = op

        query = self.user_ops.get((QUERY_CONTEXT, QUERY_OPERATION))
        if query is None:
            raise self._error(Pos(1, 1), "missing 'def : query() : Set(Origin)' in context Graph")
        if query.params or self._resolve(query.result) != QUERY_RESULT:
            raise self._error(query.pos, "query must take no parameters and return Set(Origin)")

    def check_operation(self, op: OperationDef) -> OperationDef:
        scope = [_Var("self", ClassType(op.context))]
        scope += [_Var(p.name, self._resolve(p.type)) for p in op.params]
        body = self.expr(op.body, scope)
        declared = self._resolve(op.result)
        if not self.mm.conforms(body.type, declared):
            raise self._error(
                op.body.pos, f"body of '{op.name}' has type {body.type}, expected {declared}"
            )
        return dataclasses.replace(op, body=body)

    def _user_op(self, class_name: str, name: str) -> OperationDef | None:
        for ancestor in self.mm.ancestors(class_name):
            op = self.user_ops.get((ancestor, name))
            if op is not None:
                return op
        return None

    # -- name resolution -----------------------------------------------------------------------------

    def _has_member(self, t: FpqlType, name: str) -> bool:
        if not isinstance(t, ClassType):
            return False
        return name in self.mm.members(t.name) or self._user_op(t.name, name) is not None

    def _implicit_receiver(self, name: str, scope: list[_Var], pos: Pos) -> VariableRef:
        for var in reversed(scope):
            if var.implicit and self._has_member(var.type, name):
                return VariableRef(var.name, True, pos, var.type)
        self_var = scope[0]
        if self._has_member(self_var.type, name):
            return VariableRef("self", True, pos, self_var.type)
        receiver = self._default_receiver(scope, pos)
        owner = str(receiver.type)
        candidates = self._members_of(owner) if isinstance(receiver.type, ClassType) else []
        candidates += [v.name for v in scope if not v.implicit and v.name != "self"]
        raise self._unknown_member(pos, owner, name, candidates)

    def _default_receiver(self, scope: list[_Var], pos: Pos) -> VariableRef:
        """Innermost implicit iterator variable, else `self`."""
        var = next((v for v in reversed(scope) if v.implicit), scope[0])
        return VariableRef(var.name, True, pos, var.type)

    # -- expressions ---------------------------------------------------------------------------------

    def expr(self, e: Expr, scope: list[_Var]) -> Expr:
        match e:
            case IntegerLiteral():
                return dataclasses.replace(e, type=INTEGER)
            case StringLiteral():
                return dataclasses.replace(e, type=STRING)
            case BooleanLiteral():
                return dataclasses.replace(e, type=BOOLEAN)
            case NullLiteral():
                return dataclasses.replace(e, type=NULL)
            case VariableRef():
                var = next((v for v in reversed(scope) if v.name == e.name and not v.implicit), None)
                if var is None:
                    var = next((v for v in reversed(scope) if v.name == e.name), None)
                if var is None:
                    raise self._error(e.pos, f"unknown variable '{e.name}'")
                return dataclasses.replace(e, type=var.type)
            case Identifier():
                var = next((v for v in reversed(scope) if v.name == e.name and not v.implicit), None)
                if var is not None:
                    return VariableRef(e.name, False, e.pos, var.type)
                receiver = self._implicit_receiver(e.name, scope, e.pos)
                return self._navigation(Navigation(receiver, e.name, e.pos), receiver)
            case Navigation():
                source = self.expr(e.source, scope)
                return self._navigation(e, source)
            case OperationCall():
                return self._call(e, scope)
            case TypeOperation():
                return self._type_operation(e, scope)
            case IteratorExp():
                return self._iterator(e, scope)
            case Unary():
                return self._unary(e, scope)
            case Binary():
                return self._binary(e, scope)
            case If():
                condition = self.expr(e.condition, scope)
                self._expect_boolean(condition, "if condition")
                then = self.expr(e.then, scope)
                otherwise = self.expr(e.otherwise, scope)
                joined = self.mm.join(then.type, otherwise.type)
                if joined is None:
                    raise self._error(
                        e.pos, f"if branches have unrelated types {then.type} and {otherwise.type}"
                    )
                return If(condition, then, otherwise, e.pos, joined)
        raise TypeError(f"not an expression: {e!r}")

    def _expect_boolean(self, e: Expr, what: str) -> None:
        if not self.mm.conforms(e.type, BOOLEAN):
            raise self._error(e.pos, f"{what} must be Boolean, got {e.type}")

    def _navigation(self, e: Navigation, source: Expr) -> Expr:
        st = source.type
        if isinstance(st, CollectionType):
            raise self._error(
                e.pos,
                f"cannot navigate '.{e.name}' on collection {st}; use ->collect({e.name})",
            )
        if not isinstance(st, ClassType):
            raise self._error(e.pos, f"cannot navigate '.{e.name}' on {st}")
        attr = self.mm.attribute(st.name, e.name)
        if attr is None:
            if self.mm.operation(st.name, e.name) or self._user_op(st.name, e.name):
                raise self._error(e.pos, f"'{e.name}' is an operation of {st}; call it as {e.name}()")
            raise self._unknown_member(e.pos, st.name, e.name, self._members_of(st.name))
        return Navigation(source, e.name, e.pos, attr)

    def _call(self, e: OperationCall, scope: list[_Var]) -> Expr:
        if e.source is None:
            source: Expr = self._implicit_receiver(e.name, scope, e.pos)
        else:
            source = self.expr(e.source, scope)
        args = tuple(self.expr(a, scope) for a in e.args)
        st = source.type

        if e.arrow or (e.name == "oclAsSet" and isinstance(st, CollectionType)):
            return self._collection_call(e, source, args)
        if e.name == "oclAsSet":
            self._arity(e, args, 0)
            return OperationCall(source, e.name, args, e.arrow, e.pos, set_of(st))
        if isinstance(st, CollectionType):
            if e.name in COLLECTION_OPERATIONS:
                raise self._error(e.pos, f"collection operation '{e.name}' needs '->', not '.'")
            raise self._error(e.pos, f"cannot call '.{e.name}()' on collection {st}; use ->collect")
        if e.name in COLLECTION_OPERATIONS:
            raise self._error(
                e.pos, f"'{e.name}()' is a collection operation but {st} is a scalar; use ->{e.name}()"
            )
        if not isinstance(st, ClassType):
            raise self._error(e.pos, f"cannot call '{e.name}()' on {st}")

        builtin = self.mm.operation(st.name, e.name)
        user = self._user_op(st.name, e.name)
        if builtin is not None:
            params = builtin.params
            result = builtin.result
        elif user is not None:
            params = tuple((p.name, self._resolve(p.type)) for p in user.params)
            result = self._resolve(user.result)
        else:
            if self.mm.attribute(st.name, e.name) is not None:
                raise self._error(e.pos, f"'{e.name}' is an attribute of {st}; drop the parentheses")
            raise self._unknown_member(e.pos, st.name, e.name, self._members_of(st.name))
        self._arity(e, args, len(params))
        for arg, (pname, ptype) in zip(args, params, strict=True):
            if not self.mm.conforms(arg.type, ptype):
                raise self._error(arg.pos, f"argument '{pname}' of '{e.name}' expects {ptype}, got {arg.type}")
        return OperationCall(source, e.name, args, e.arrow, e.pos, result)

    def _arity(self, e: OperationCall, args: tuple[Expr, ...], expected: int) -> None:
        if len(args) != expected:
            raise self._error(e.pos, f"'{e.name}' takes {expected} argument(s), got {len(args)}")

    def _collection_call(self, e: OperationCall, source: Expr, args: tuple[Expr, ...]) -> Expr:
        elem = element_type(source.type)
        match e.name:
            case "size":
                self._arity(e, args, 0)
                result: FpqlType = INTEGER
            case "isEmpty" | "notEmpty":
                self._arity(e, args, 0)
                result = BOOLEAN
            case "includes" | "excludes":
                self._arity(e, args, 1)
                if not self.mm.comparable(args[0].type, elem):
                    raise self._error(args[0].pos, f"'{e.name}' on {source.type} cannot take {args[0].type}")
                result = BOOLEAN
            case "asSet" | "oclAsSet":
                self._arity(e, args, 0)
                result = set_of(elem)
            case _:
                known = sorted(COLLECTION_OPERATIONS)
                raise self._unknown_member(e.pos, f"collection {source.type}", e.name, known)
        return OperationCall(source, e.name, args, e.arrow, e.pos, result)

    def _type_operation(self, e: TypeOperation, scope: list[_Var]) -> Expr:
        if e.source is None:
            source: Expr = self._default_receiver(scope, e.pos)
        else:
            source = self.expr(e.source, scope)
        target = self._resolve(e.target)
        st = source.type
        if not isinstance(target, ClassType) or not isinstance(st, (ClassType, NullType)):
            raise self._error(e.pos, f"'{e.name}' applies to objects and class names, got {st} and {target}")
        if not self.mm.comparable(st, target):
            raise self._error(e.pos, f"{target} is not a subtype of {st}; '{e.name}' can never succeed")
        result = target if e.is_cast else BOOLEAN
        return TypeOperation(source, e.name, e.target, e.pos, result)

    def _iterator(self, e: IteratorExp, scope: list[_Var]) -> Expr:
        source = self.expr(e.source, scope)
        st = source.type
        if isinstance(st, NullType):
            raise self._error(source.pos, f"'->{e.iterator}' over a bare null")
        kind = st.kind if isinstance(st, CollectionType) else "Set"
        elem = element_type(st)
        var_type = elem
        if e.var_type is not None:
            var_type = self._resolve(e.var_type)
            if not self.mm.conforms(elem, var_type):
                raise self._error(e.var_type.pos, f"iterator variable of type {var_type} cannot range over {st}")
        if e.var is not None:
            name, implicit = e.var, False
        else:
            self.counter += 1
            name, implicit = f"_it{self.counter}", True
        body = self.expr(e.body, [*scope, _Var(name, var_type, implicit)])
        bt = body.type

        match e.iterator:
            case "select" | "reject":
                self._expect_boolean(body, f"{e.iterator} body")
                result: FpqlType = CollectionType(kind, elem)
            case "exists" | "forAll":
                self._expect_boolean(body, f"{e.iterator} body")
                result = BOOLEAN
            case "collect":
                flat = element_type(bt)
                result = CollectionType("Sequence" if kind == "Sequence" else "Bag", flat)
            case "closure":
                if not self.mm.conforms(element_type(bt), elem):
                    raise self._error(
                        body.pos, f"closure body yields {bt}, which does not conform to {elem}"
                    )
                result = set_of(elem)
            case _:
                raise self._error(e.pos, f"unknown iterator '{e.iterator}'")
        return IteratorExp(source, e.iterator, name, e.var_type, body, implicit, e.pos, result)

    def _unary(self, e: Unary, scope: list[_Var]) -> Expr:
        operand = self.expr(e.operand, scope)
        if e.op == "not":
            self._expect_boolean(operand, "operand of 'not'")
            return Unary(e.op, operand, e.pos, BOOLEAN)
        if not self.mm.conforms(operand.type, INTEGER):
            raise self._error(e.pos, f"unary '-' expects Integer, got {operand.type}")
        return Unary(e.op, operand, e.pos, INTEGER)

    def _binary(self, e: Binary, scope: list[_Var]) -> Expr:
        left = self.expr(e.left, scope)
        right = self.expr(e.right, scope)
        lt, rt = left.type, right.type
        match e.op:
            case "and" | "or":
                self._expect_boolean(left, f"left operand of '{e.op}'")
                self._expect_boolean(right, f"right operand of '{e.op}'")
                result: FpqlType = BOOLEAN
            case "=" | "<>":
                if not self.mm.comparable(lt, rt):
                    raise self._error(e.pos, f"cannot compare {lt} with {rt}")
                result = BOOLEAN
            case op if op in ORDERING_OPERATORS:
                ok = any(
                    self.mm.conforms(lt, p) and self.mm.conforms(rt, p) for p in (INTEGER, STRING)
                )
                if not ok or not (isinstance(lt, PrimitiveType) or isinstance(rt, PrimitiveType)):
                    raise self._error(e.pos, f"'{op}' expects two Integers or two Strings, got {lt} and {rt}")
                result = BOOLEAN
            case "+" | "-":
                if not (self.mm.conforms(lt, INTEGER) and self.mm.conforms(rt, INTEGER)):
                    raise self._error(e.pos, f"'{e.op}' expects Integers, got {lt} and {rt}")
                result = INTEGER
            case _:
                raise self._error(e.pos, f"unknown operator '{e.op}'")
        return Binary(e.op, left, right, e.pos, result)


def typecheck(document: QueryFile, metamodel: Metamodel = METAMODEL) -> TypedQuery:
    """Type `document` against `metamodel`.

    Raises:
        FpqlTypeError: With the position and a description naming the expected
            and actual types, or the nearest known name for unknown members.

    """
    checker = _Checker(document, metamodel)
    checker.collect_signatures()
    typed_contexts = tuple(
        dataclasses.replace(ctx, defs=tuple(checker.check_operation(op) for op in ctx.defs))
        for ctx in document.contexts
    )
    typed = dataclasses.replace(document, contexts=typed_contexts)
    operations = {op.key: op for op in typed.operations()}
    log.debug("typechecked {} operations", len(operations))
    return TypedQuery(typed, operations, metamodel)
