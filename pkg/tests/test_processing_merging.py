import dataclasses
from types import MappingProxyType

import pytest

from pvdb.errors import AppendOnlyViolationError, IntegrityConflictError
from pvdb.models.archive import ArchiveGraph, Origin, OriginVisit
from pvdb.processing.merging import archive_includes, merge_append_only
from pvdb.simulation.forge import synthesize

from conftest import assemble, make_repository


def test_merge_is_idempotent(small_archive):
    assert merge_append_only(small_archive, small_archive) == small_archive


def test_merge_absorbs_an_earlier_export(sim_params):
    early, late = synthesize(sim_params, [1_550_000_000, 1_600_000_000], threads=1)
    assert archive_includes(late, early)
    assert merge_append_only(late, early) == late
    assert merge_append_only(early, late) == late


def test_disjoint_archives_merge_to_their_union():
    a = assemble(100, make_repository("https://a.example/1", revisions=2, root_ts=1, visits=(10,)))
    b = assemble(200, make_repository("https://b.example/2", revisions=3, root_ts=1, visits=(20,)))
    merged = merge_append_only(a, b)
    assert len(merged.origins) == len(a.origins) + len(b.origins)
    assert merged.export_timestamp == 200
    assert merged.nodes.keys() == a.nodes.keys() | b.nodes.keys()


def test_inserting_a_visit_into_history_is_rejected():
    origin, nodes = make_repository("https://a.example/1", revisions=1, root_ts=1, visits=(10, 30))
    base = ArchiveGraph.build(100, nodes, [origin])
    snapshot = origin.visits[0].snapshot
    delta = ArchiveGraph.build(100, nodes, [Origin(origin.url, (OriginVisit(20, snapshot),))])
    with pytest.raises(AppendOnlyViolationError, match="https://a.example/1"):
        merge_append_only(base, delta)


def test_same_visit_with_another_snapshot_is_rejected():
    first, first_nodes = make_repository("https://a.example/1", revisions=1, root_ts=1, visits=(10,))
    other, other_nodes = make_repository("https://a.example/1", revisions=2, root_ts=1, visits=(10,))
    base = ArchiveGraph.build(100, first_nodes, [first])
    delta = ArchiveGraph.build(100, other_nodes, [other])
    with pytest.raises(AppendOnlyViolationError):
        merge_append_only(base, delta)


def test_conflicting_node_records_are_rejected(small_archive):
    swhid, node = next((k, v) for k, v in small_archive.nodes.items() if k.node_type == "rev")
    forged = dataclasses.replace(node, message=b"rewritten")
    delta = ArchiveGraph(small_archive.export_timestamp, MappingProxyType({}), MappingProxyType({swhid: forged}))
    with pytest.raises(IntegrityConflictError):
        merge_append_only(small_archive, delta)
