from pvdb.query import sampling
from pvdb.query.ast import ITERATORS, IteratorExp, walk
from pvdb.query.parser import parse
from pvdb.query.sampling import FRAGMENTS, sample_predicate, sample_query
from pvdb.query.typecheck import typecheck


def test_same_seed_and_index_give_the_same_text():
    assert sample_query(3, 17) == sample_query(3, 17)
    window = (0, 100)
    assert sample_predicate(3, 17, time_range=window) == sample_predicate(3, 17, time_range=window)
    assert len({sample_query(3, i) for i in range(30)}) > 1


def test_samples_typecheck():
    for index in range(3 * len(FRAGMENTS)):
        typed = typecheck(parse(sample_query(11, index)))
        assert ("Revision", "rootOf") in typed.operations


def test_consecutive_indices_cover_every_fragment(monkeypatch):
    used = set()

    def recording(fragment):
        def wrapped(rng, times):
            used.add(fragment.__name__)
            return fragment(rng, times)

        return wrapped

    monkeypatch.setattr(sampling, "FRAGMENTS", tuple(recording(f) for f in FRAGMENTS))
    for index in range(100, 100 + len(FRAGMENTS)):
        sample_predicate(5, index)
    assert used == {f.__name__ for f in FRAGMENTS}


def test_samples_use_every_expression_kind_and_iterator():
    kinds, iterators = set(), set()
    for index in range(len(FRAGMENTS)):
        typed = typecheck(parse(sample_query(1, index)))
        for op in typed.operations.values():
            for expr in walk(op.body):
                kinds.add(type(expr).__name__)
                if isinstance(expr, IteratorExp):
                    iterators.add(expr.iterator)
    assert iterators == ITERATORS
    assert kinds >= {
        "IntegerLiteral",
        "StringLiteral",
        "BooleanLiteral",
        "NullLiteral",
        "VariableRef",
        "Navigation",
        "OperationCall",
        "TypeOperation",
        "IteratorExp",
        "Unary",
        "Binary",
        "If",
    }
