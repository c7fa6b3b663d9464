import pytest

from pvdb.errors import InvalidParamsError
from pvdb.models.simulation import SimParams
from pvdb.processing.integrity import verify_integrity
from pvdb.processing.merging import archive_includes, merge_append_only
from pvdb.simulation.forge import simulate_origin, synthesize
from pvdb.simulation.rng import CounterRng
from pvdb.store.exchange import save_archive

TIMES = [1_530_000_000, 1_560_000_000, 1_600_000_000]


def test_same_inputs_give_identical_files(tmp_path, sim_params):
    (first,) = synthesize(sim_params, [TIMES[-1]], threads=1)
    (second,) = synthesize(sim_params, [TIMES[-1]], threads=4)
    a = save_archive(first, tmp_path / "a.pvdb.jsonl")
    b = save_archive(second, tmp_path / "b.pvdb.jsonl")
    assert a.read_bytes() == b.read_bytes()


def test_zero_origins_give_empty_archives(sim_params):
    params = sim_params.model_copy(update={"origin_count": 0})
    (archive,) = synthesize(params, [TIMES[0]])
    assert not archive.origins and not archive.nodes
    assert archive.export_timestamp == TIMES[0]


def test_series_is_append_only(sim_params):
    params = sim_params.model_copy(update={"origin_count": 50})
    archives = synthesize(params, TIMES, threads=2)
    for archive in archives:
        assert verify_integrity(archive).ok
    for earlier, later in zip(archives, archives[1:], strict=False):
        assert len(earlier.nodes) <= len(later.nodes)
        assert archive_includes(later, earlier)
        assert merge_append_only(earlier, later) == later
        for url, origin in earlier.origins.items():
            assert later.origins[url].visits[: len(origin.visits)] == origin.visits


def test_history_grows_before_each_visit(sim_params):
    sim = simulate_origin(sim_params, 3)
    assert len(sim.new_nodes) == len(sim.origin.visits)
    assert all(nodes for nodes in sim.new_nodes)


def test_marker_probability_extremes(sim_params):
    always = sim_params.model_copy(update={"marker_file_probability": 1.0})
    never = sim_params.model_copy(update={"marker_file_probability": 0.0})
    assert all(simulate_origin(always, i).has_marker for i in range(10))
    assert not any(simulate_origin(never, i).has_marker for i in range(10))


def test_marker_fraction_converges(sim_params):
    params = sim_params.model_copy(
        update={
            "origin_count": 1000,
            "marker_file_probability": 0.3,
            "visits_per_origin": (1, 1),
            "revisions_per_visit_growth": (1, 1),
        }
    )
    fraction = sum(simulate_origin(params, i).has_marker for i in range(1000)) / 1000
    assert 0.25 <= fraction <= 0.35


@pytest.mark.parametrize("times", [[], [1_560_000_000, 1_530_000_000], [1_700_000_000]])
def test_bad_export_times_are_rejected(sim_params, times):
    with pytest.raises(InvalidParamsError):
        synthesize(sim_params, times)


def test_params_validate_ranges():
    with pytest.raises(ValueError):
        SimParams(seed=1, origin_count=1, time_range=(10, 5))
    with pytest.raises(ValueError):
        SimParams(seed=1, origin_count=1, time_range=(1, 5), visits_per_origin=(3, 2))


def test_counter_rng_streams_are_independent_of_draw_order():
    a = CounterRng(42, "origin", 1)
    b = CounterRng(42, "origin", 2)
    first = [a.next_u64() for _ in range(3)]
    b.next_u64()
    assert [CounterRng(42, "origin", 1).next_u64() for _ in range(1)] == first[:1]
    assert a.derive("x").next_u64() == CounterRng(42, "origin", 1).derive("x").next_u64()
    assert CounterRng(1).distinct_integers(5, 0, 4) == [0, 1, 2, 3, 4]
