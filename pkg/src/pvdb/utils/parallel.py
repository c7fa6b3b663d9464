"""Ordered fan-out over a thread pool.

Results always come back in input order, so the worker count never changes
what a caller sees. With one worker the calls run inline.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

from pvdb.config import settings
from pvdb.utils.progress import progress


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else `settings.threads`, else the core count."""
    if threads is None:
        threads = settings.threads
    if threads is None:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ValueError(f"thread count must be positive, got {threads}")
    return threads


def map_ordered[T, R](
    fn: Callable[[T], R], items: Sequence[T], *, threads: int | None = None, desc: str = "working"
) -> list[R]:
    """Apply `fn` to every item and return the results in input order.

    The first exception in input order propagates once every submitted task
    has settled.
    """
    workers = min(resolve_threads(threads), max(len(items), 1))
    if workers == 1:
        return [fn(item) for item in progress(items, desc=desc, total=len(items))]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="pvdb") as pool:
        return list(progress(pool.map(fn, items), desc=desc, total=len(items)))
