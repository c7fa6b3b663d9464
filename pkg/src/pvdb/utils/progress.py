"""Utilities for allocating unique console progress bar positions.

Provides a thread-safe counter used to assign `position` values to
concurrent `tqdm` progress bars, plus a small factory that honours the
`enable_progress` setting.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from threading import Lock
from typing import TypeVar

from tqdm import tqdm

from pvdb.config import settings

T = TypeVar("T")

_counter = itertools.count(0)
_lock = Lock()


def get_next_position() -> int:
    """Return a next integer position for assigning to a progress bar.

    Returns:
        int: Next available position value.

    """
    with _lock:
        return next(_counter)


def reset_positions() -> None:
    """Reset the progress bar position counter.

    Intended for tests and deterministic runs only; not safe to call concurrently
    while progress bars are actively being used.
    """
    global _counter
    with _lock:
        _counter = itertools.count(0)


def progress(iterable: Iterable[T], *, desc: str, total: int | None = None, unit: str = "it") -> Iterable[T]:
    """Wrap `iterable` in a stderr `tqdm` bar when progress output is enabled.

    Args:
        iterable (Iterable[T]): Items to iterate.
        desc (str): Bar label.
        total (int | None): Known length, if the iterable has none.
        unit (str): Unit label.

    Returns:
        Iterable[T]: The iterable itself or a `tqdm` wrapper around it.

    """
    if not settings.enable_progress:
        return iterable
    return tqdm(
        iterable,
        desc=desc,
        total=total,
        unit=unit,
        position=get_next_position(),
        leave=False,
    )
