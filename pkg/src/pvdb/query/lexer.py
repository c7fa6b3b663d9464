"""FPQL tokenizer."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from pvdb.errors import FpqlSyntaxError
from pvdb.query.ast import Pos


class TokenType(Enum):
    IDENT = auto()
    INTEGER = auto()
    STRING = auto()
    KEYWORD = auto()
    SYMBOL = auto()
    EOF = auto()


KEYWORDS = frozenset(
    {
        "and",
        "context",
        "def",
        "else",
        "endif",
        "endpackage",
        "false",
        "if",
        "import",
        "not",
        "null",
        "or",
        "package",
        "self",
        "then",
        "true",
    }
)

# Longest first so that `->` wins over `-` and `<=` over `<`
SYMBOLS = ("->", "<>", "<=", ">=", "(", ")", ",", ":", "|", ".", "=", "<", ">", "+", "-")

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "'": "'", '"': '"', "\\": "\\"}


@dataclass(frozen=True, slots=True)
class Token:
    type: TokenType
    value: str
    pos: Pos

    def describe(self) -> str:
        match self.type:
            case TokenType.EOF:
                return "end of input"
            case TokenType.STRING:
                return f"string '{self.value}'"
            case TokenType.INTEGER:
                return f"integer {self.value}"
            case TokenType.IDENT:
                return f"identifier '{self.value}'"
        return f"'{self.value}'"


class Lexer:
    """Turns FPQL source into tokens; `/* ... */` and `-- ...` comments are skipped."""

    def __init__(self, source: str) -> None:
        self.source = source
        self.index = 0
        self.line = 1
        self.column = 1

    def _pos(self) -> Pos:
        return Pos(self.line, self.column)

    def _advance(self, count: int = 1) -> None:
        for _ in range(count):
            if self.source[self.index] == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
            self.index += 1

    def _peek(self, offset: int = 0) -> str:
        i = self.index + offset
        return self.source[i] if i < len(self.source) else ""

    def _skip_trivia(self) -> None:
        while self.index < len(self.source):
            char = self._peek()
            if char.isspace():
                self._advance()
            elif char == "/" and self._peek(1) == "*":
                start = self._pos()
                end = self.source.find("*/", self.index + 2)
                if end < 0:
                    raise FpqlSyntaxError(start.line, start.column, "unterminated comment", frozenset({"*/"}))
                self._advance(end + 2 - self.index)
            elif char == "-" and self._peek(1) == "-":
                while self.index < len(self.source) and self._peek() != "\n":
                    self._advance()
            else:
                return

    def _string(self) -> Token:
        start = self._pos()
        quote = self._peek()
        self._advance()
        chars: list[str] = []
        while True:
            char = self._peek()
            if char == "":
                raise FpqlSyntaxError(start.line, start.column, "unterminated string", frozenset({quote}))
            if char == quote:
                self._advance()
                return Token(TokenType.STRING, "".join(chars), start)
            if char == "\\":
                escaped = _ESCAPES.get(self._peek(1))
                if escaped is None:
                    here = self._pos()
                    raise FpqlSyntaxError(
                        here.line, here.column, f"escape '\\{self._peek(1)}'", frozenset(_ESCAPES)
                    )
                chars.append(escaped)
                self._advance(2)
                continue
            chars.append(char)
            self._advance()

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            self._skip_trivia()
            start = self._pos()
            char = self._peek()
            if char == "":
                out.append(Token(TokenType.EOF, "", start))
                return out
            if char in "'\"":
                out.append(self._string())
            elif char.isdigit():
                end = self.index
                while end < len(self.source) and self.source[end].isdigit():
                    end += 1
                out.append(Token(TokenType.INTEGER, self.source[self.index : end], start))
                self._advance(end - self.index)
            elif char.isalpha() or char == "_":
                end = self.index
                while end < len(self.source) and (self.source[end].isalnum() or self.source[end] == "_"):
                    end += 1
                word = self.source[self.index : end]
                kind = TokenType.KEYWORD if word in KEYWORDS else TokenType.IDENT
                out.append(Token(kind, word, start))
                self._advance(end - self.index)
            else:
                symbol = next((s for s in SYMBOLS if self.source.startswith(s, self.index)), None)
                if symbol is None:
                    raise FpqlSyntaxError(start.line, start.column, f"character {char!r}", frozenset())
                out.append(Token(TokenType.SYMBOL, symbol, start))
                self._advance(len(symbol))


def tokenize(source: str) -> list[Token]:
    return Lexer(source).tokens()
