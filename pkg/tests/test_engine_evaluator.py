from types import MappingProxyType

import pytest

from pvdb.engine.evaluator import evaluate, per_origin_predicate
from pvdb.engine.fingerprint import compile_query
from pvdb.engine.reference import reference_select
from pvdb.errors import BudgetExceededError, ClosureCycleError, NullComparisonError
from pvdb.models.archive import (
    ArchiveGraph,
    NodeType,
    Origin,
    OriginVisit,
    Revision,
    SnapshotBranch,
    Swhid,
)
from pvdb.models.fingerprint import EvalBudget
from pvdb.pipeline import ANDROID_APPS_QUERY
from pvdb.processing.hashing import new_directory, new_snapshot

from conftest import EXPORT_TS, assemble, make_repository


HEADER = "context Graph def : query():Set(Origin) = "
HEAD = "o.getLastSnapshot().branches->exists(b | b.getRevision()"


def _query(predicate: str) -> str:
    return f"{HEADER}origins->select(o | {predicate})"


def _urls(origins) -> list[str]:
    return [o.url for o in origins]


@pytest.mark.parametrize("threads", [1, 4])
def test_android_query_selects_only_a(android_archive, threads):
    query = compile_query(ANDROID_APPS_QUERY)
    selected = evaluate(query, android_archive.restrict(EXPORT_TS), threads=threads)
    assert _urls(selected) == ["https://github.com/acme/a"]


def test_select_true_returns_every_origin_in_byte_order(android_archive):
    selected = evaluate(compile_query(_query("true")), android_archive.restrict(EXPORT_TS))
    assert _urls(selected) == sorted(android_archive.origins, key=str.encode)


def test_other_query_shapes_run_as_one_task(small_archive):
    query = compile_query(f"{HEADER}origins->reject(o | o.url = 'x')")
    assert per_origin_predicate(query.query.body) is None
    assert len(evaluate(query, small_archive.restrict(1_000))) == 3


def test_origins_without_visits_at_t_are_not_candidates(small_archive):
    selected = evaluate(compile_query(_query("true")), small_archive.restrict(150))
    assert _urls(selected) == ["https://github.com/x/one"]


def test_strings_compare_bytewise(small_archive):
    query = compile_query(_query("o.url < 'https://github.com/x/p'"))
    selected = evaluate(query, small_archive.restrict(1_000))
    assert _urls(selected) == ["https://github.com/x/one"]


def test_ordering_on_null_is_an_error(small_archive):
    # the single revision of y/three has no parent
    query = compile_query(
        _query(f"{HEAD}.parent.authorTimestamp > 0)")
    )
    with pytest.raises(NullComparisonError):
        evaluate(query, small_archive.restrict(1_000), threads=1)


def test_equality_with_null_is_allowed(small_archive):
    query = compile_query(
        _query(f"{HEAD}.parent = null)")
    )
    assert _urls(evaluate(query, small_archive.restrict(1_000))) == ["https://gitlab.com/y/three"]


def test_node_budget_names_the_origin(android_archive):
    with pytest.raises(BudgetExceededError) as info:
        evaluate(
            compile_query(ANDROID_APPS_QUERY),
            android_archive.restrict(EXPORT_TS),
            EvalBudget(max_nodes=10),
            threads=1,
        )
    assert info.value.resource == "node-visit"
    assert info.value.origin == "https://github.com/acme/a"


def test_depth_budget_stops_long_recursion(android_archive):
    with pytest.raises(BudgetExceededError) as info:
        evaluate(
            compile_query(ANDROID_APPS_QUERY),
            android_archive.restrict(EXPORT_TS),
            EvalBudget(max_depth=100),
        )
    assert info.value.resource == "recursion-depth"


def test_closure_cycle_is_an_integrity_error():
    tree = new_directory([])
    looping_id = Swhid(NodeType.REVISION, bytes(range(20)))
    looping = Revision(looping_id, tree.id, (looping_id,), "", 0, "", 0, b"")
    snapshot = new_snapshot([SnapshotBranch(b"refs/heads/main", looping_id)])
    origin = Origin("https://example.org/loop", (OriginVisit(10, snapshot.id),))
    archive = ArchiveGraph(
        100,
        MappingProxyType({origin.url: origin}),
        MappingProxyType({n.id: n for n in (tree, looping, snapshot)}),
    )
    query = compile_query(
        _query(f"{HEAD}->closure(parent)->size() > 1)")
    )
    with pytest.raises(ClosureCycleError):
        evaluate(query, archive.restrict(100))


@pytest.mark.parametrize(
    "predicate",
    [
        # walks to the root and then keeps answering the root
        f"{HEAD}->closure(r | if r.parent = null then r else r.parent endif)->size() = 3)",
        "o.visits->size()->closure(n | if n < 3 then n + 1 else 3 endif)->size() = 3",
    ],
)
def test_closure_reaching_a_fixpoint_is_not_a_cycle(predicate):
    archive = assemble(
        EXPORT_TS, make_repository("https://example.org/short", revisions=3, root_ts=1, visits=(10,))
    )
    query = compile_query(_query(predicate))
    view = archive.restrict(EXPORT_TS)
    assert _urls(evaluate(query, view)) == ["https://example.org/short"]
    assert reference_select(query, view) == ("https://example.org/short",)


def test_collect_drops_nulls():
    # a branch pointing at a directory has no revision
    origin, nodes = make_repository("https://example.org/odd", revisions=1, root_ts=1, visits=(10,))
    tree = next(n for n in nodes if n.node_type is NodeType.DIRECTORY and len(n.entries) == 3)
    snapshot = new_snapshot([SnapshotBranch(b"refs/heads/tree", tree.id)])
    odd = Origin(origin.url, (OriginVisit(10, snapshot.id),))
    archive = ArchiveGraph.build(100, [*nodes, snapshot], [odd])
    query = compile_query(
        _query("o.getLastSnapshot().branches->collect(b | b.getRevision())->isEmpty()")
    )
    assert _urls(evaluate(query, archive.restrict(100))) == [origin.url]


@pytest.mark.slow
def test_hundred_thousand_revision_chain():
    archive = assemble(
        EXPORT_TS,
        make_repository("https://github.com/acme/huge", revisions=100_000, root_ts=1_500_000_000),
    )
    selected = evaluate(compile_query(ANDROID_APPS_QUERY), archive.restrict(EXPORT_TS), threads=1)
    assert _urls(selected) == ["https://github.com/acme/huge"]
