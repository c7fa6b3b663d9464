"""Graph generator: materialise the raw dataset of an origin list.

The dataset of a list at time t keeps every listed origin with all of its
visits at or before t, plus exactly the nodes reachable from those visits'
snapshots. It is itself an archive whose export timestamp is t, so it can
be fed back to the engine or extracted from again.
"""

from __future__ import annotations

from loguru import logger

from pvdb.errors import StaleListError, TimestampAheadError
from pvdb.models.archive import ArchiveGraph, Origin, Swhid
from pvdb.models.dataset import DatasetGraph, Provenance
from pvdb.models.fingerprint import OriginList, OriginListEntry
from pvdb.processing.integrity import IntegrityIssue, IntegrityReport, IssueKind, verify_integrity
from pvdb.processing.reachability import reachable
from pvdb.processing.temporal import restrict_to_timestamp
from pvdb.utils.parallel import map_ordered
from pvdb.utils.timefmt import to_rfc3339

log = logger.bind(component="extract")


def _selected_origins(archive: ArchiveGraph, origins: OriginList, t: int) -> list[Origin]:
    view = restrict_to_timestamp(archive, t)
    selected: list[Origin] = []
    for entry in origins.entries:
        origin = view.origins.get(entry.url)
        if origin is None:
            raise StaleListError(
                f"origin {entry.url} is not in the archive or has no visit at or before {to_rfc3339(t)}"
            )
        last = origin.visits[-1]
        if last.snapshot != entry.snapshot:
            raise StaleListError(
                f"origin {entry.url}: list names snapshot {entry.snapshot} but the last visit at "
                f"{to_rfc3339(t)} is {last.snapshot}"
            )
        selected.append(origin)
    return selected


def extract_subgraph(
    source: ArchiveGraph | DatasetGraph,
    origins: OriginList,
    t: int,
    *,
    threads: int | None = None,
) -> DatasetGraph:
    """Build the dataset graph of `origins` at time `t`.

    Extracting from a dataset keeps its original source export timestamp in
    the provenance, so extraction is idempotent.

    Args:
        source (ArchiveGraph | DatasetGraph): Export (or earlier dataset) to extract from.
        origins (OriginList): Selected origins with their last snapshots at `t`.
        t (int): Fingerprint timestamp, unix seconds.
        threads (int | None): Workers for the per-origin reachability walks.

    Returns:
        DatasetGraph: The reference-closed subgraph with its provenance header.

    Raises:
        TimestampAheadError: `t` is after the source's export timestamp.
        StaleListError: A listed origin is unknown at `t` or its snapshot differs.

    """
    if isinstance(source, DatasetGraph):
        archive, source_export = source.graph, source.provenance.source_export_timestamp
    else:
        archive, source_export = source, source.export_timestamp
    if t > archive.export_timestamp:
        raise TimestampAheadError(to_rfc3339(t), to_rfc3339(archive.export_timestamp))

    selected = _selected_origins(archive, origins, t)

    def walk(origin: Origin) -> set[Swhid]:
        return reachable(archive.nodes, {v.snapshot for v in origin.visits})

    keep: set[Swhid] = set()
    for part in map_ordered(walk, selected, threads=threads, desc="extracting"):
        keep |= part
    graph = ArchiveGraph.build(t, (archive.nodes[s] for s in keep), selected)
    provenance = Provenance(source_export, t, origins.dataset_hash())
    log.info("extracted {} origins, {} nodes at {}", len(selected), len(keep), to_rfc3339(t))
    return DatasetGraph(graph, provenance)


def dataset_origin_list(dataset: DatasetGraph) -> OriginList:
    """The origin list a dataset was extracted for, read back from its own visits."""
    return OriginList(
        tuple(
            OriginListEntry(origin.url, origin.visits[-1].snapshot)
            for origin in dataset.graph.origins.values()
            if origin.visits
        )
    )


def verify_dataset(dataset: DatasetGraph) -> IntegrityReport:
    """Integrity report of a dataset, plus its own invariants.

    On top of `verify_integrity`, checks that every node is reachable from
    a retained visit and that the provenance hash matches the hash of the
    dataset's own origin list.
    """
    report = verify_integrity(dataset.graph)
    issues = list(report.issues)
    if report.ok:
        roots = {v.snapshot for o in dataset.graph.origins.values() for v in o.visits}
        live = reachable(dataset.graph.nodes, roots)
        issues += [
            IntegrityIssue(str(s), IssueKind.UNREACHABLE_NODE, "not reachable from any visit")
            for s in dataset.graph.nodes
            if s not in live
        ]
    computed = dataset_origin_list(dataset).dataset_hash()
    if computed != dataset.provenance.dataset_hash:
        issues.append(
            IntegrityIssue(
                "meta",
                IssueKind.DATASET_HASH,
                f"provenance records {dataset.provenance.dataset_hash}, origins hash to {computed}",
            )
        )
    return IntegrityReport(tuple(sorted(issues)))
