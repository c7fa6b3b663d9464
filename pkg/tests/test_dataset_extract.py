import dataclasses

import pytest

from pvdb.dataset.extract import dataset_origin_list, extract_subgraph, verify_dataset
from pvdb.engine.fingerprint import run_fingerprint
from pvdb.errors import StaleListError, TimestampAheadError
from pvdb.models.fingerprint import Fingerprint, OriginList, OriginListEntry
from pvdb.pipeline import ANDROID_APPS_QUERY
from pvdb.processing.hashing import content_for_bytes
from pvdb.processing.integrity import IssueKind
from pvdb.processing.reachability import reachable
from pvdb.store.exchange import archive_lines

from conftest import EXPORT_TS

EMPTY_LIST_HASH = "fdc3dcf6430d8a3909fa0ae68ff88420443019ee58a1a7c024769071f42b5c08"


def _list_at(archive, t, *urls) -> OriginList:
    view = archive.restrict(t)
    return OriginList(tuple(OriginListEntry(u, view.last_visit(u).snapshot) for u in urls))


def test_empty_list_gives_an_empty_dataset(small_archive):
    dataset = extract_subgraph(small_archive, OriginList(), 1_000)
    assert not dataset.graph.nodes and not dataset.graph.origins
    assert dataset.provenance.dataset_hash == EMPTY_LIST_HASH
    assert verify_dataset(dataset).ok


def test_nodes_are_the_union_of_reachable_sets(small_archive):
    urls = ("https://github.com/x/one", "https://github.com/x/two")
    dataset = extract_subgraph(small_archive, _list_at(small_archive, 1_000, *urls), 1_000)
    roots = {v.snapshot for u in urls for v in small_archive.origins[u].visits}
    assert set(dataset.graph.nodes) == reachable(small_archive.nodes, roots)
    # the README of the unselected origin stays behind
    assert content_for_bytes(b"README contents").id not in dataset.graph.nodes
    assert verify_dataset(dataset).ok


def test_visits_after_t_are_dropped(small_archive):
    origins = _list_at(small_archive, 250, "https://github.com/x/one")
    dataset = extract_subgraph(small_archive, origins, 250)
    (origin,) = dataset.graph.origins.values()
    assert [v.timestamp for v in origin.visits] == [100, 200]
    assert dataset.graph.export_timestamp == 250
    assert dataset.provenance.source_export_timestamp == 1_000
    assert dataset.provenance.fingerprint_timestamp == 250
    assert dataset_origin_list(dataset) == origins


def test_fingerprint_reruns_on_its_dataset(android_archive):
    fp = Fingerprint(query=ANDROID_APPS_QUERY, timestamp=EXPORT_TS)
    result = run_fingerprint(fp, android_archive)
    dataset = extract_subgraph(android_archive, result.origins, EXPORT_TS)
    assert run_fingerprint(fp, dataset.graph).dataset_hash == result.dataset_hash
    assert dataset.provenance.dataset_hash == result.dataset_hash


def test_extraction_is_idempotent(small_archive):
    origins = _list_at(small_archive, 250, "https://github.com/x/one", "https://github.com/x/two")
    once = extract_subgraph(small_archive, origins, 250)
    twice = extract_subgraph(once, origins, 250, threads=3)
    assert archive_lines(twice.graph, twice.provenance) == archive_lines(once.graph, once.provenance)


def test_stale_lists_are_rejected(small_archive):
    old = _list_at(small_archive, 150, "https://github.com/x/one")
    other = _list_at(small_archive, 1_000, "https://github.com/x/two").entries[0].snapshot
    wrong = OriginList((OriginListEntry("https://github.com/x/one", other),))
    with pytest.raises(StaleListError, match="names snapshot"):
        extract_subgraph(small_archive, wrong, 1_000)
    with pytest.raises(StaleListError, match="no visit at or before"):
        extract_subgraph(small_archive, _list_at(small_archive, 1_000, "https://gitlab.com/y/three"), 250)
    with pytest.raises(TimestampAheadError):
        extract_subgraph(small_archive, old, 1_001)


def test_verify_dataset_flags_its_own_invariants(small_archive):
    origins = _list_at(small_archive, 1_000, "https://github.com/x/two")
    dataset = extract_subgraph(small_archive, origins, 1_000)

    forged = dataclasses.replace(
        dataset, provenance=dataclasses.replace(dataset.provenance, dataset_hash="0" * 64)
    )
    assert verify_dataset(forged).subjects(IssueKind.DATASET_HASH) == {"meta"}

    stray = content_for_bytes(b"stray")
    graph = dataclasses.replace(dataset.graph, nodes={**dataset.graph.nodes, stray.id: stray})
    report = verify_dataset(dataclasses.replace(dataset, graph=graph))
    assert report.subjects(IssueKind.UNREACHABLE_NODE) == {str(stray.id)}
