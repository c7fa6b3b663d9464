"""Worklist reachability over the node store.

Walks references breadth-first with an explicit queue and a visited set, so
arbitrarily long revision chains never touch the interpreter stack.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping

from pvdb.errors import DanglingReferenceError
from pvdb.models.archive import Node, Swhid


def reachable(nodes: Mapping[Swhid, Node], roots: Iterable[Swhid]) -> set[Swhid]:
    """Return every Swhid reachable from `roots`, roots included.

    Raises:
        DanglingReferenceError: If a reachable reference is missing from `nodes`.

    """
    seen: set[Swhid] = set()
    todo: deque[tuple[Swhid, Swhid | None]] = deque((root, None) for root in roots)
    while todo:
        swhid, referrer = todo.popleft()
        if swhid in seen:
            continue
        node = nodes.get(swhid)
        if node is None:
            raise DanglingReferenceError(swhid, referrer or "a root set")
        seen.add(swhid)
        todo.extend((ref, swhid) for ref in node.references() if ref not in seen)
    return seen
