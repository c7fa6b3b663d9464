import pytest

from pvdb.errors import FpqlSyntaxError
from pvdb.pipeline import ANDROID_APPS_QUERY
from pvdb.query.ast import Binary, Identifier, IntegerLiteral, IteratorExp, Navigation, Unary
from pvdb.query.parser import parse, parse_expression


def test_android_query_parses_with_its_header():
    document = parse(ANDROID_APPS_QUERY)
    assert document.package == "swhModel"
    assert [imp.alias for imp in document.imports] == ["swhModel"]
    assert [(c.type_name, [d.name for d in c.defs]) for c in document.contexts] == [
        ("Graph", ["query"]),
        ("Revision", ["getRootRevision"]),
    ]


def test_minimal_document():
    document = parse("context Graph def : query():Set(Origin) = origins")
    (query,) = document.operations()
    assert query.body == Identifier("origins")
    assert str(query.result) == "Set(Origin)"


def test_unclosed_call_fails_at_end_of_input():
    with pytest.raises(FpqlSyntaxError) as info:
        parse("context Graph def : query():Set(Origin) = origins->select(")
    assert info.value.found == "end of input"
    assert "identifier" in info.value.expected
    assert info.value.line == 1


def test_error_position_is_line_and_column():
    with pytest.raises(FpqlSyntaxError) as info:
        parse("context Graph\ndef : query() : Set(Origin) =\n    origins ->select(o | o.url = )")
    assert (info.value.line, info.value.column) == (3, 34)


def test_precedence_and_associativity():
    assert parse_expression("1 - 2 - 3") == Binary(
        "-", Binary("-", IntegerLiteral(1), IntegerLiteral(2)), IntegerLiteral(3)
    )
    expr = parse_expression("not a or b and c")
    assert isinstance(expr, Binary) and expr.op == "or"
    assert expr.left == Unary("not", Identifier("a"))
    assert parse_expression("-x.y") == Unary("-", Navigation(Identifier("x"), "y"))


def test_iterator_variable_forms():
    implicit = parse_expression("xs->exists(name = 'a')")
    typed = parse_expression("xs->closure(e : DirectoryEntry | e)")
    assert isinstance(implicit, IteratorExp) and implicit.var is None
    assert isinstance(typed, IteratorExp) and typed.var == "e"
    assert str(typed.var_type) == "DirectoryEntry"


def test_comments_and_both_quote_styles():
    expr = parse_expression("/* block */ a = \"x\" -- trailing\n")
    assert expr == parse_expression("a = 'x'")


def test_bad_escape_is_a_syntax_error():
    with pytest.raises(FpqlSyntaxError):
        parse_expression(r"'\q'")
