"""Recursive-descent parser for FPQL.

Grammar (informal)::

    file       := header? contextDef+ "endpackage"?
    header     := ("import" IDENT ":" STRING)* ("package" IDENT)?
    contextDef := "context" IDENT def+
    def        := "def" ":" IDENT "(" (param ("," param)*)? ")" ":" type "=" expr
    type       := IDENT | ("Set" | "Sequence" | "Bag") "(" IDENT ")"

Expression precedence, loosest first: `or`, `and`, `=` `<>`, `<` `<=` `>`
`>=`, `+` `-`, prefix `not` `-`, postfix `.` and `->`.
"""

from __future__ import annotations

from pvdb.errors import FpqlSyntaxError
from pvdb.query.ast import (
    ITERATORS,
    TYPE_OPERATIONS,
    Binary,
    BooleanLiteral,
    ContextDef,
    Expr,
    Identifier,
    If,
    Import,
    IntegerLiteral,
    IteratorExp,
    Navigation,
    NullLiteral,
    OperationCall,
    OperationDef,
    Param,
    QueryFile,
    StringLiteral,
    TypeOperation,
    TypeSpec,
    Unary,
    VariableRef,
)
from pvdb.query.lexer import Token, TokenType, tokenize
from pvdb.query.types import COLLECTION_KINDS

BINARY_LEVELS: tuple[frozenset[str], ...] = (
    frozenset({"or"}),
    frozenset({"and"}),
    frozenset({"=", "<>"}),
    frozenset({"<", "<=", ">", ">="}),
    frozenset({"+", "-"}),
)

EXPRESSION_START = frozenset(
    {"identifier", "integer", "string", "true", "false", "null", "self", "not", "if", "(", "-"}
)


class Parser:
    def __init__(self, source: str) -> None:
        self.tokens = tokenize(source)
        self.index = 0

    # -- token helpers -------------------------------------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def _at(self, value: str) -> bool:
        tok = self.current
        return tok.type in (TokenType.SYMBOL, TokenType.KEYWORD) and tok.value == value

    def _fail(self, expected: set[str] | frozenset[str]) -> FpqlSyntaxError:
        tok = self.current
        return FpqlSyntaxError(tok.pos.line, tok.pos.column, tok.describe(), frozenset(expected))

    def _advance(self) -> Token:
        tok = self.current
        if tok.type is not TokenType.EOF:
            self.index += 1
        return tok

    def _expect(self, value: str) -> Token:
        if not self._at(value):
            raise self._fail({value})
        return self._advance()

    def _ident(self) -> Token:
        if self.current.type is not TokenType.IDENT:
            raise self._fail({"identifier"})
        return self._advance()

    # -- file structure ------------------------------------------------------------------------------

    def parse_file(self) -> QueryFile:
        imports: list[Import] = []
        while self._at("import"):
            self._advance()
            alias = self._ident().value
            self._expect(":")
            if self.current.type is not TokenType.STRING:
                raise self._fail({"string"})
            imports.append(Import(alias, self._advance().value))
        package = None
        if self._at("package"):
            self._advance()
            package = self._ident().value

        contexts: list[ContextDef] = []
        while self._at("context"):
            contexts.append(self._context())
        if not contexts:
            raise self._fail({"context"} | ({"import", "package"} if not imports and package is None else set()))
        if package is not None and self._at("endpackage"):
            self._advance()
        if self.current.type is not TokenType.EOF:
            raise self._fail({"context", "def", "end of input"} | ({"endpackage"} if package else set()))
        return QueryFile(tuple(contexts), tuple(imports), package)

    def _context(self) -> ContextDef:
        start = self._expect("context").pos
        type_name = self._ident().value
        defs = [self._def(type_name)]
        while self._at("def"):
            defs.append(self._def(type_name))
        return ContextDef(type_name, tuple(defs), start)

    def _def(self, context: str) -> OperationDef:
        start = self._expect("def").pos
        self._expect(":")
        name = self._ident().value
        self._expect("(")
        params: list[Param] = []
        if not self._at(")"):
            params.append(self._param())
            while self._at(","):
                self._advance()
                params.append(self._param())
        self._expect(")")
        self._expect(":")
        result = self._type()
        self._expect("=")
        body = self.expression()
        return OperationDef(context, name, tuple(params), result, body, start)

    def _param(self) -> Param:
        tok = self._ident()
        self._expect(":")
        return Param(tok.value, self._type(), tok.pos)

    def _type(self) -> TypeSpec:
        tok = self._ident()
        if tok.value in COLLECTION_KINDS and self._at("("):
            self._advance()
            element = self._ident().value
            self._expect(")")
            return TypeSpec(element, tok.value, tok.pos)
        return TypeSpec(tok.value, None, tok.pos)

    # -- expressions ---------------------------------------------------------------------------------

    def expression(self) -> Expr:
        return self._binary(0)

    def _binary(self, level: int) -> Expr:
        if level == len(BINARY_LEVELS):
            return self._unary()
        left = self._binary(level + 1)
        ops = BINARY_LEVELS[level]
        while self.current.type in (TokenType.SYMBOL, TokenType.KEYWORD) and self.current.value in ops:
            op = self._advance()
            right = self._binary(level + 1)
            left = Binary(op.value, left, right, op.pos)
        return left

    def _unary(self) -> Expr:
        if self._at("not") or self._at("-"):
            op = self._advance()
            return Unary(op.value, self._unary(), op.pos)
        return self._postfix(self._primary())

    def _primary(self) -> Expr:
        tok = self.current
        match tok.type:
            case TokenType.INTEGER:
                self._advance()
                return IntegerLiteral(int(tok.value), tok.pos)
            case TokenType.STRING:
                self._advance()
                return StringLiteral(tok.value, tok.pos)
            case TokenType.IDENT:
                self._advance()
                if self._at("("):
                    return self._call(None, tok, arrow=False)
                return Identifier(tok.value, tok.pos)
            case TokenType.KEYWORD if tok.value in ("true", "false"):
                self._advance()
                return BooleanLiteral(tok.value == "true", tok.pos)
            case TokenType.KEYWORD if tok.value == "null":
                self._advance()
                return NullLiteral(tok.pos)
            case TokenType.KEYWORD if tok.value == "self":
                self._advance()
                return VariableRef("self", pos=tok.pos)
            case TokenType.KEYWORD if tok.value == "if":
                self._advance()
                condition = self.expression()
                self._expect("then")
                then = self.expression()
                self._expect("else")
                otherwise = self.expression()
                self._expect("endif")
                return If(condition, then, otherwise, tok.pos)
            case TokenType.SYMBOL if tok.value == "(":
                self._advance()
                inner = self.expression()
                self._expect(")")
                return inner
        raise self._fail(EXPRESSION_START)

    def _postfix(self, expr: Expr) -> Expr:
        while True:
            if self._at("."):
                self._advance()
                name = self._ident()
                if self._at("("):
                    expr = self._call(expr, name, arrow=False)
                else:
                    expr = Navigation(expr, name.value, name.pos)
            elif self._at("->"):
                self._advance()
                name = self._ident()
                if name.value in ITERATORS:
                    expr = self._iterator(expr, name)
                elif self._at("("):
                    expr = self._call(expr, name, arrow=True)
                else:
                    raise self._fail({"("})
            else:
                return expr

    def _call(self, source: Expr | None, name: Token, *, arrow: bool) -> Expr:
        self._expect("(")
        if name.value in TYPE_OPERATIONS and not arrow:
            target = self._type()
            self._expect(")")
            return TypeOperation(source, name.value, target, name.pos)
        args: list[Expr] = []
        if not self._at(")"):
            args.append(self.expression())
            while self._at(","):
                self._advance()
                args.append(self.expression())
        self._expect(")")
        return OperationCall(source, name.value, tuple(args), arrow, name.pos)

    def _iterator(self, source: Expr, name: Token) -> IteratorExp:
        self._expect("(")
        var: str | None = None
        var_type: TypeSpec | None = None
        if self.current.type is TokenType.IDENT and self._peek().value in (":", "|") and self._peek().type is TokenType.SYMBOL:
            var = self._advance().value
            if self._at(":"):
                self._advance()
                var_type = self._type()
            self._expect("|")
        body = self.expression()
        self._expect(")")
        return IteratorExp(source, name.value, var, var_type, body, pos=name.pos)


def parse(source: str) -> QueryFile:
    """Parse a query document into an untyped tree.

    Raises:
        FpqlSyntaxError: With line:column, the offending token and the expected-token set.

    """
    return Parser(source).parse_file()


def parse_expression(source: str) -> Expr:
    """Parse a single expression; the whole input must be consumed."""
    parser = Parser(source)
    expr = parser.expression()
    if parser.current.type is not TokenType.EOF:
        raise parser._fail({"end of input"})
    return expr
