"""FPQL frontend: lexer, parser, typechecker, printer and query sampler."""

from .parser import parse, parse_expression
from .printer import print_expr, print_query
from .sampling import sample_query
from .typecheck import TypedQuery, typecheck
from .types import METAMODEL, Metamodel

__all__ = [
    "METAMODEL",
    "Metamodel",
    "TypedQuery",
    "parse",
    "parse_expression",
    "print_expr",
    "print_query",
    "sample_query",
    "typecheck",
]
