import threading
import time

import pytest

from pvdb.config import settings
from pvdb.utils.parallel import map_ordered, resolve_threads
from pvdb.utils.progress import get_next_position, progress, reset_positions


def test_resolve_threads(monkeypatch):
    assert resolve_threads(3) == 3
    monkeypatch.setattr(settings, "threads", 2)
    assert resolve_threads() == 2
    monkeypatch.setattr(settings, "threads", None)
    assert resolve_threads() >= 1
    with pytest.raises(ValueError):
        resolve_threads(0)


@pytest.mark.parametrize("threads", [1, 4])
def test_results_keep_input_order(threads):
    def slow_square(n: int) -> int:
        # later items finish first
        time.sleep((10 - n) * 0.001)
        return n * n

    assert map_ordered(slow_square, list(range(10)), threads=threads) == [n * n for n in range(10)]


def test_single_worker_runs_inline():
    seen = map_ordered(lambda _: threading.current_thread().name, [1, 2], threads=1)
    assert seen == [threading.current_thread().name] * 2


def test_first_failure_in_input_order_propagates():
    def fail_on_odd(n: int) -> int:
        if n % 2:
            raise KeyError(n)
        return n

    with pytest.raises(KeyError) as exc:
        map_ordered(fail_on_odd, [0, 1, 2, 3], threads=4)
    assert exc.value.args == (1,)


def test_progress_positions_are_unique():
    reset_positions()
    positions = [get_next_position() for _ in range(3)]
    assert positions == [0, 1, 2]
    reset_positions()
    assert get_next_position() == 0


def test_disabled_progress_returns_the_iterable():
    items = [1, 2, 3]
    assert progress(items, desc="x") is items


def test_enabled_progress_wraps_in_a_bar(monkeypatch):
    monkeypatch.setattr(settings, "enable_progress", True)
    reset_positions()
    bar = progress([1, 2, 3], desc="x")
    assert list(bar) == [1, 2, 3]
    assert get_next_position() == 1
