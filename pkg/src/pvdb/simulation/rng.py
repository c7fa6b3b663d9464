"""Counter-based pseudo-random draws.

A `CounterRng` is keyed by the global seed plus any path of identifiers
(origin index, visit index, ...). Each draw hashes (seed, key, counter) with
BLAKE2b, so a stream depends only on its key and never on what other streams
drew before or on which thread drew it.
"""

from __future__ import annotations

import hashlib
from collections.abc import Sequence

_UNIT = float(1 << 53)


class CounterRng:
    """Deterministic random stream for one key."""

    def __init__(self, seed: int, *key: int | str) -> None:
        parts = [seed.to_bytes(8, "big"), *(str(k).encode("utf-8") for k in key)]
        self._prefix = b"\x1f".join(parts) + b"\x1e"
        self._counter = 0

    def derive(self, *key: int | str) -> CounterRng:
        """Independent child stream under this stream's key."""
        child = CounterRng(0)
        child._prefix = self._prefix + b"\x1f".join(str(k).encode("utf-8") for k in key) + b"\x1e"
        return child

    def next_u64(self) -> int:
        data = self._prefix + self._counter.to_bytes(8, "big")
        self._counter += 1
        return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "big")

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) / _UNIT

    def integer(self, low: int, high: int) -> int:
        """Uniform integer in [low, high], both inclusive."""
        if low > high:
            raise ValueError(f"empty range [{low}, {high}]")
        return low + self.next_u64() % (high - low + 1)

    def choice[T](self, values: Sequence[T]) -> T:
        if not values:
            raise ValueError("cannot choose from an empty sequence")
        return values[self.integer(0, len(values) - 1)]

    def weighted[T](self, options: Sequence[tuple[T, float]]) -> T:
        """Pick one value from (value, weight) pairs; weights need not sum to 1."""
        total = sum(w for _, w in options)
        point = self.random() * total
        for value, weight in options:
            point -= weight
            if point < 0:
                return value
        return options[-1][0]

    def distinct_integers(self, count: int, low: int, high: int) -> list[int]:
        """`count` distinct integers from [low, high] in ascending order.

        Raises:
            ValueError: If the range holds fewer than `count` integers.

        """
        if high - low + 1 < count:
            raise ValueError(f"range [{low}, {high}] holds fewer than {count} integers")
        picked: set[int] = set()
        while len(picked) < count:
            picked.add(self.integer(low, high))
        return sorted(picked)
