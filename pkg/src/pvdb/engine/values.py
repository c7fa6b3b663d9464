"""Runtime values of FPQL evaluation.

Scalars are Python values: `int`, `bool`, `bytes` for every String (so
comparisons are bytewise), `None` for null, and the archive records
themselves for objects. Collections are `Collection` values; they never
contain null.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Iterator
from typing import Any


class Collection:
    """Immutable Set, Sequence or Bag.

    A Set keeps its first-seen order for deterministic iteration but compares
    as a set; a Bag compares as a multiset and a Sequence as a tuple.
    """

    __slots__ = ("items", "kind")

    def __init__(self, kind: str, items: Iterable[Any]) -> None:
        values = tuple(v for v in items if v is not None)
        if kind == "Set":
            values = tuple(dict.fromkeys(values))
        self.kind = kind
        self.items = values

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Any]:
        return iter(self.items)

    def __contains__(self, value: object) -> bool:
        return value in self.items

    def _key(self) -> object:
        match self.kind:
            case "Set":
                return frozenset(self.items)
            case "Bag":
                return frozenset(Counter(self.items).items())
        return self.items

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Collection):
            return NotImplemented
        return self.kind == other.kind and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((self.kind, self._key()))

    def __repr__(self) -> str:
        return f"{self.kind}{{{', '.join(map(repr, self.items))}}}"


def items_of(value: Any) -> tuple[Any, ...]:
    """Elements seen by `->`: a collection's items, a scalar as one element, null as none."""
    if value is None:
        return ()
    if isinstance(value, Collection):
        return value.items
    return (value,)
