"""Raw dataset graphs produced by extraction."""

from __future__ import annotations

from dataclasses import dataclass

from pvdb.models.archive import ArchiveGraph


@dataclass(frozen=True, slots=True)
class Provenance:
    """Where a dataset came from: source export, fingerprint time, dataset hash."""

    source_export_timestamp: int
    fingerprint_timestamp: int
    dataset_hash: str


@dataclass(frozen=True, slots=True)
class DatasetGraph:
    """An archive restricted to selected origins, plus its provenance header.

    `graph` is itself a valid `ArchiveGraph` whose export timestamp is the
    fingerprint timestamp, so a dataset can be fed back into the engine.
    """

    graph: ArchiveGraph
    provenance: Provenance
