from pvdb.engine.builtins import get_last_snapshot
from pvdb.processing.reachability import reachable
from pvdb.processing.temporal import restrict_to_timestamp

from conftest import assemble, make_repository


def test_export_timestamp_view_keeps_everything(small_archive):
    view = restrict_to_timestamp(small_archive, small_archive.export_timestamp)
    assert dict(view.origins) == dict(small_archive.origins)
    assert view.nodes is small_archive.nodes


def test_view_before_first_visit_is_empty(small_archive):
    assert not restrict_to_timestamp(small_archive, 99).origins


def test_view_hides_later_visits(small_archive):
    view = restrict_to_timestamp(small_archive, 250)
    one = view.origins["https://github.com/x/one"]
    assert [v.timestamp for v in one.visits] == [100, 200]
    assert view.last_visit("https://github.com/x/one").timestamp == 200
    assert "https://gitlab.com/y/three" not in view.origins
    # the archive itself is untouched
    assert len(small_archive.origins["https://github.com/x/one"].visits) == 3


def test_boundary_is_inclusive():
    origin, nodes = make_repository("https://a.example/1", revisions=1, root_ts=1, visits=(100,))
    view = restrict_to_timestamp(assemble(200, (origin, nodes)), 100)
    assert get_last_snapshot(view.origins[origin.url], view).id == origin.visits[0].snapshot


def test_restricting_twice_keeps_the_earlier_time(small_archive):
    view = restrict_to_timestamp(restrict_to_timestamp(small_archive, 150), 900)
    assert view.timestamp == 150


def test_reachable_walks_a_whole_repository():
    origin, nodes = make_repository("https://a.example/1", revisions=4, root_ts=1, visits=(10,))
    archive = assemble(100, (origin, nodes))
    assert reachable(archive.nodes, [origin.visits[0].snapshot]) == {n.id for n in nodes}
