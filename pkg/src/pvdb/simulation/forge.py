"""Synthetic forge: deterministic series of append-only archive exports.

Every origin's complete history is generated once from its own random
stream, independently of the export times. An export at time t then keeps
the visits at or before t together with the nodes those visits introduced.
Later exports therefore always contain earlier ones, and the archive at a
given time does not depend on which other export times were requested.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from loguru import logger

from pvdb.errors import InvalidParamsError
from pvdb.models.archive import (
    ArchiveGraph,
    Directory,
    DirectoryEntry,
    Node,
    Origin,
    OriginVisit,
    Revision,
    SnapshotBranch,
    Swhid,
)
from pvdb.models.simulation import SimParams
from pvdb.processing.hashing import (
    content_for_bytes,
    new_directory,
    new_release,
    new_revision,
    new_snapshot,
)
from pvdb.simulation.rng import CounterRng
from pvdb.utils.parallel import map_ordered

MERGE_PROBABILITY = 0.1
FILE_PERMS = 0o100644
DIR_PERMS = 0o040000

AUTHORS = ("Alice <alice@example.org>", "Bob <bob@example.org>", "Carol <carol@example.org>")
OWNERS = ("acme", "droid-lab", "mobile-team", "opensource", "sandbox", "tools")
MESSAGES = (b"Initial import", b"Fix build", b"Update dependencies", b"Refactor", b"Add feature")
# Spread of root commits before the first visit when no root window is given
ROOT_LEAD_SECONDS = 30 * 86_400

log = logger.bind(component="forge-sim")


@dataclass(frozen=True, slots=True)
class SimulatedOrigin:
    """One origin's full history: its visits and the nodes each visit introduced."""

    origin: Origin
    # new_nodes[k] holds the nodes first needed by visit k
    new_nodes: tuple[tuple[Node, ...], ...]
    has_marker: bool

    def nodes_until(self, t: int) -> list[Node]:
        return [n for visit, nodes in zip(self.origin.visits, self.new_nodes, strict=True)
                if visit.timestamp <= t for n in nodes]


class _History:
    """Mutable builder for one origin's revision graph."""

    def __init__(self, params: SimParams, index: int, rng: CounterRng, has_marker: bool) -> None:
        self.params = params
        self.index = index
        self.rng = rng
        self.pending: dict[Swhid, Node] = {}
        self.chain: list[Revision] = []
        self.counter = 0
        self.static_entries = self._static_entries(has_marker)

    def add[N: Node](self, node: N) -> N:
        self.pending[node.id] = node
        return node

    def _static_entries(self, has_marker: bool) -> list[DirectoryEntry]:
        source = self.add(content_for_bytes(b"def main():\n    return 0\n"))
        src_dir = self.add(new_directory([DirectoryEntry(b"main.py", source.id, FILE_PERMS)]))
        entries = [DirectoryEntry(b"src", src_dir.id, DIR_PERMS)]
        if has_marker:
            manifest = self.add(content_for_bytes(b'<manifest package="org.example.app"/>\n'))
            marker = DirectoryEntry(self.params.marker_file_name.encode("utf-8"), manifest.id, FILE_PERMS)
            app_dir = self.add(new_directory([marker]))
            entries.append(DirectoryEntry(b"app", app_dir.id, DIR_PERMS))
        return entries

    def _tree(self, label: str) -> Directory:
        self.counter += 1
        readme = self.add(
            content_for_bytes(f"project {self.index} {label} {self.counter}\n".encode())
        )
        return self.add(
            new_directory([*self.static_entries, DirectoryEntry(b"README.md", readme.id, FILE_PERMS)])
        )

    def _revision(self, parents: tuple[Swhid, ...], ts: int, label: str) -> Revision:
        author = self.rng.choice(AUTHORS)
        return self.add(
            new_revision(
                self._tree(label).id,
                parents,
                author=author,
                author_timestamp=ts,
                committer=author,
                committer_timestamp=ts,
                message=self.rng.choice(MESSAGES),
            )
        )

    def grow(self, count: int, start: int, end: int) -> None:
        """Append `count` main-line revisions with timestamps spread over (start, end].

        The root commit, if this is the first growth, lands exactly at `start + 1`.
        """
        ts = start
        if not self.chain:
            ts += 1
            self.chain.append(self._revision((), ts, "root"))
            count -= 1
        step = max(1, (end - ts) // (count + 1))
        for _ in range(count):
            ts += step
            head = self.chain[-1]
            if self.rng.random() < MERGE_PROBABILITY:
                fork = self.chain[self.rng.integer(0, len(self.chain) - 1)]
                side = self._revision((fork.id,), ts, "side")
                self.chain.append(self._revision((head.id, side.id), ts, "merge"))
            else:
                self.chain.append(self._revision((head.id,), ts, "main"))

    def take_pending(self) -> tuple[Node, ...]:
        nodes = tuple(self.pending.values())
        self.pending = {}
        return nodes


def simulate_origin(params: SimParams, index: int) -> SimulatedOrigin:
    """Generate the complete history of origin `index` under `params`."""
    rng = CounterRng(params.seed, "origin", index)
    host = rng.weighted(params.forge_hosts)
    url = f"https://{host}/{rng.choice(OWNERS)}/project-{index:05d}"
    has_marker = rng.random() < params.marker_file_probability
    branch_name = rng.choice(params.branch_name_pool).encode("utf-8")

    start, end = params.time_range
    visit_count = min(rng.integer(*params.visits_per_origin), end - start + 1)
    visit_times = rng.distinct_integers(visit_count, start, end)

    if params.root_timestamp_range is not None:
        clock = rng.integer(*params.root_timestamp_range) - 1
    else:
        clock = visit_times[0] - rng.integer(1, ROOT_LEAD_SECONDS)

    history = _History(params, index, rng.derive("history"), has_marker)
    tags: list[SnapshotBranch] = []
    visits: list[OriginVisit] = []
    new_nodes: list[tuple[Node, ...]] = []
    for k, visit_ts in enumerate(visit_times, start=1):
        growth = rng.integer(*params.revisions_per_visit_growth)
        # Commits land before the visit when time allows, otherwise right after the previous ones
        history.grow(growth, clock, max(visit_ts, clock + growth + 1))
        head = history.chain[-1]
        clock = head.committer_timestamp
        if k % 2 == 1:
            release = history.add(
                new_release(f"v{k}", head.id, timestamp=head.committer_timestamp, message=b"release")
            )
            tags.append(SnapshotBranch(f"refs/tags/v{k}".encode(), release.id))
        snapshot = history.add(new_snapshot([SnapshotBranch(branch_name, head.id), *tags]))
        visits.append(OriginVisit(visit_ts, snapshot.id))
        new_nodes.append(history.take_pending())

    return SimulatedOrigin(Origin(url, tuple(visits)), tuple(new_nodes), has_marker)


def _check_export_times(params: SimParams, export_times: Sequence[int]) -> None:
    if not export_times:
        raise InvalidParamsError("at least one export time is required")
    start, end = params.time_range
    for previous, current in zip(export_times, export_times[1:], strict=False):
        if current <= previous:
            raise InvalidParamsError(f"export times must be strictly increasing ({previous} >= {current})")
    outside = [t for t in export_times if not start <= t <= end]
    if outside:
        raise InvalidParamsError(f"export times {outside} fall outside time_range [{start}, {end}]")


def export_at(origins: Sequence[SimulatedOrigin], t: int) -> ArchiveGraph:
    """Archive export at time `t` from fully simulated origin histories."""
    nodes: dict[Swhid, Node] = {}
    kept: list[Origin] = []
    for sim in origins:
        visits = sim.origin.visits_until(t)
        if not visits:
            continue
        kept.append(Origin(sim.origin.url, visits))
        for node in sim.nodes_until(t):
            nodes.setdefault(node.id, node)
    return ArchiveGraph.build(t, nodes.values(), kept)


def synthesize(
    params: SimParams, export_times: Sequence[int], *, threads: int | None = None
) -> list[ArchiveGraph]:
    """Generate one archive per export time.

    Args:
        params (SimParams): Shape of the synthetic forge.
        export_times (Sequence[int]): Strictly increasing unix seconds within `params.time_range`.
        threads (int | None): Worker count for per-origin generation; never affects the output.

    Returns:
        list[ArchiveGraph]: Append-only series: each archive contains the previous ones.

    Raises:
        InvalidParamsError: If export times are unordered or outside the time range.

    """
    _check_export_times(params, export_times)
    origins = map_ordered(
        lambda i: simulate_origin(params, i),
        range(params.origin_count),
        threads=threads,
        desc="synthesizing origins",
    )
    archives = [export_at(origins, t) for t in export_times]
    log.info(
        "synthesized {} origins into {} exports (largest: {} nodes)",
        params.origin_count,
        len(archives),
        len(archives[-1].nodes),
    )
    return archives
