import pytest

from pvdb.engine.fingerprint import run_fingerprint
from pvdb.errors import DatasetHashMismatchError, TimestampAheadError
from pvdb.models.fingerprint import Fingerprint
from pvdb.pipeline import ANDROID_APPS_QUERY

from conftest import EXPORT_TS, assemble, make_repository

EMPTY_LIST_HASH = "fdc3dcf6430d8a3909fa0ae68ff88420443019ee58a1a7c024769071f42b5c08"
ALL = "context Graph def : query():Set(Origin) = origins->select(o | true)"


def _exports():
    """Two exports of the same forge; the later one adds visits and an origin after t=500."""
    early = assemble(
        1_000,
        make_repository("https://github.com/x/one", revisions=2, root_ts=10, visits=(100, 400)),
        make_repository("https://github.com/x/two", revisions=1, root_ts=10, visits=(300,)),
    )
    late = assemble(
        2_000,
        make_repository("https://github.com/x/one", revisions=2, root_ts=10, visits=(100, 400, 1_500)),
        make_repository("https://github.com/x/two", revisions=1, root_ts=10, visits=(300,)),
        make_repository("https://github.com/x/new", revisions=1, root_ts=10, visits=(1_200,)),
    )
    return early, late


def test_runs_are_deterministic(android_archive):
    fp = Fingerprint(query=ANDROID_APPS_QUERY, timestamp=EXPORT_TS)
    first = run_fingerprint(fp, android_archive, threads=1)
    second = run_fingerprint(fp, android_archive, threads=4)
    assert first.origins.urls == ("https://github.com/acme/a",)
    assert first.origins.serialize() == second.origins.serialize()
    assert first.dataset_hash == second.dataset_hash == first.origins.dataset_hash()


def test_fingerprint_replays_on_a_later_export():
    early, late = _exports()
    fp = Fingerprint(query=ALL, timestamp=500)
    assert run_fingerprint(fp, early).dataset_hash == run_fingerprint(fp, late).dataset_hash
    assert len(run_fingerprint(fp.model_copy(update={"timestamp": 2_000}), late).origins) == 3


def test_fingerprint_newer_than_export_is_rejected():
    early, _ = _exports()
    with pytest.raises(TimestampAheadError) as info:
        run_fingerprint(Fingerprint(query=ALL, timestamp=1_001), early)
    assert info.value.exit_code == 1


def test_recorded_hash_must_match():
    early, _ = _exports()
    good = run_fingerprint(Fingerprint(query=ALL, timestamp=500), early).dataset_hash
    assert run_fingerprint(Fingerprint(query=ALL, timestamp=500, dataset_hash=good), early)
    with pytest.raises(DatasetHashMismatchError) as info:
        run_fingerprint(Fingerprint(query=ALL, timestamp=500, dataset_hash="0" * 64), early)
    assert info.value.exit_code == 2
    assert info.value.computed == good


def test_before_every_visit_the_list_is_empty():
    early, _ = _exports()
    result = run_fingerprint(Fingerprint(query=ALL, timestamp=50), early)
    assert len(result.origins) == 0
    assert result.dataset_hash == EMPTY_LIST_HASH


def test_optimizer_toggle_keeps_the_hash(android_archive):
    fp = Fingerprint(query=ANDROID_APPS_QUERY, timestamp=EXPORT_TS)
    assert (
        run_fingerprint(fp, android_archive, optimize=False).dataset_hash
        == run_fingerprint(fp, android_archive, optimize=True).dataset_hash
    )


def test_timestamps_parse_from_rfc3339():
    assert Fingerprint(query=ALL, timestamp="2022-04-15T05:20:00Z").timestamp == 1_650_000_000
    with pytest.raises(ValueError):
        Fingerprint(query=ALL, timestamp=0, dataset_hash="ABC")
