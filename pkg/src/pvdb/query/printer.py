"""Pretty-printer for FPQL trees.

Printing inserts exactly the parentheses precedence requires, so for every
tree `t` the parser returns, `parse(print_query(t)) == t`. Typed trees print
too: references to implicit receivers and generated iterator variables are
left out, giving back the source form.
"""

from __future__ import annotations

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
    QueryFile,
    StringLiteral,
    TypeOperation,
    Unary,
    VariableRef,
)

# Binding strength per binary operator; higher binds tighter
_LEVEL = {"or": 1, "and": 2, "=": 3, "<>": 3, "<": 4, "<=": 4, ">": 4, ">=": 4, "+": 5, "-": 5}
_UNARY = 6
_POSTFIX = 7
_ATOM = 8

_QUOTE = str.maketrans({"\\": "\\\\", "'": "\\'", "\n": "\\n", "\t": "\\t", "\r": "\\r"})


def _strength(e: Expr) -> int:
    match e:
        case Binary(op=op):
            return _LEVEL[op]
        case Unary():
            return _UNARY
        case Navigation() | OperationCall() | TypeOperation() | IteratorExp():
            return _POSTFIX
    return _ATOM


def _wrap(e: Expr, minimum: int) -> str:
    text = print_expr(e)
    return f"({text})" if _strength(e) < minimum else text


def _is_implicit(source: Expr | None) -> bool:
    return source is None or (isinstance(source, VariableRef) and source.implicit)


def _receiver(source: Expr | None, sep: str) -> str:
    if _is_implicit(source):
        return ""
    assert source is not None
    return _wrap(source, _POSTFIX) + sep


def print_expr(e: Expr) -> str:
    """Source text for one expression."""
    match e:
        case IntegerLiteral(value=value):
            return str(value)
        case StringLiteral(value=value):
            return f"'{value.translate(_QUOTE)}'"
        case BooleanLiteral(value=value):
            return "true" if value else "false"
        case NullLiteral():
            return "null"
        case Identifier(name=name) | VariableRef(name=name):
            return name
        case Navigation(source=source, name=name):
            return _receiver(source, ".") + name
        case OperationCall(source=source, name=name, args=args, arrow=arrow):
            prefix = _receiver(source, "->" if arrow else ".")
            return f"{prefix}{name}({', '.join(print_expr(a) for a in args)})"
        case TypeOperation(source=source, name=name, target=target):
            return f"{_receiver(source, '.')}{name}({target})"
        case IteratorExp(source=source, iterator=it, var=var, var_type=var_type, body=body, implicit_var=implicit):
            head = ""
            if var is not None and not implicit:
                head = f"{var} : {var_type} | " if var_type is not None else f"{var} | "
            return f"{_wrap(source, _POSTFIX)}->{it}({head}{print_expr(body)})"
        case Unary(op=op, operand=operand):
            inner = _wrap(operand, _UNARY)
            if op == "-":
                if inner.startswith("-"):
                    inner = f"({inner})"
                return f"-{inner}"
            return f"not {inner}"
        case Binary(op=op, left=left, right=right):
            level = _LEVEL[op]
            return f"{_wrap(left, level)} {op} {_wrap(right, level + 1)}"
        case If(condition=c, then=t, otherwise=o):
            return f"if {print_expr(c)} then {print_expr(t)} else {print_expr(o)} endif"
    raise TypeError(f"not an expression: {e!r}")


def print_operation(op: OperationDef) -> str:
    params = ", ".join(f"{p.name} : {p.type}" for p in op.params)
    return f"def : {op.name}({params}) : {op.result} =\n    {print_expr(op.body)}"


def print_query(document: QueryFile) -> str:
    """Source text for a whole document, header lines included."""
    lines = [f"import {imp.alias} : '{imp.uri.translate(_QUOTE)}'" for imp in document.imports]
    if document.package is not None:
        lines.append(f"package {document.package}")
    for ctx in document.contexts:
        lines.append(f"context {ctx.type_name}")
        lines.extend(print_operation(op) for op in ctx.defs)
    if document.package is not None:
        lines.append("endpackage")
    return "\n".join(lines) + "\n"
