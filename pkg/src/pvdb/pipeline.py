"""Replication pipeline: synthetic exports, fingerprint runs and comparisons.

This module exposes `ReplicationPipeline`, which chains forge simulation,
fingerprint execution and list comparison into the three checks the
project is built around:

- variation: one fingerprint per export time, all run on the newest
  export; result counts are expected to change with the timestamp, and
  every run is cross-checked against the reference interpreter;
- determinism: the first fingerprint run twice (single-threaded and with
  the requested workers) must give byte-identical lists;
- replay: the first fingerprint run on every later export must reproduce
  the list it gave on the first export.
"""

from __future__ import annotations

import dataclasses
import pathlib
from collections.abc import Sequence

import polars as pl
from loguru import logger

from pvdb.dataset.reports import DiffReport, diff_lists, forge_matrix
from pvdb.engine.fingerprint import compile_query, select
from pvdb.engine.reference import reference_select
from pvdb.models.archive import ArchiveGraph
from pvdb.models.fingerprint import EvalBudget, OriginList
from pvdb.models.simulation import SimParams
from pvdb.processing.temporal import restrict_to_timestamp
from pvdb.query.typecheck import TypedQuery
from pvdb.reporting import export
from pvdb.simulation.forge import synthesize
from pvdb.store.exchange import FILE_SUFFIX, save_archive
from pvdb.store.lists import save_origin_list
from pvdb.utils.timefmt import file_stamp, to_rfc3339

log = logger.bind(component="pipeline")

ANDROID_APPS_QUERY = """\
import swhModel : 'platform:/resource/swhModel/model/swhModel.ecore'
package swhModel
context Graph
def : query():Set(Origin) = origins->select(
    getLastSnapshot().branches->exists(
        (name='refs/heads/master' or name='refs/heads/main')
        and
        /* the branch holds more than 1000 revisions */
        getRevision()->closure(parent)->size() > 1000
        and
        /* its root revision was committed after 2015-01-01 */
        getRevision().getRootRevision().commiterTimestamp > 1420066800
        and
        /* its tree contains an AndroidManifest.xml file */
        getRevision().tree.entries->closure(entry : DirectoryEntry |
            if entry.child.oclIsKindOf(Directory) then
                entry.child.oclAsType(Directory).entries.oclAsSet()
            else
                entry.oclAsSet()
            endif
        )->exists(e : DirectoryEntry | e.name = 'AndroidManifest.xml')))
context Revision
def : getRootRevision() : Revision =
    if parent = null then self
    else parent.getRootRevision() endif
endpackage
"""


@dataclasses.dataclass(frozen=True, slots=True)
class RunRecord:
    """One fingerprint run: fingerprint time, export it ran on, and its result."""

    timestamp: int
    export_timestamp: int
    origins: OriginList
    dataset_hash: str

    @property
    def label(self) -> str:
        return to_rfc3339(self.timestamp)


@dataclasses.dataclass(frozen=True, slots=True, eq=False)
class ReplicationReport:
    exports: tuple[pathlib.Path, ...]
    variation: tuple[RunRecord, ...]
    oracle_agrees: bool
    forges: pl.DataFrame
    repeat_identical: bool
    replay: tuple[DiffReport, ...]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(run.origins) for run in self.variation)

    @property
    def replay_precision(self) -> tuple[float | None, ...]:
        return tuple(d.precision for d in self.replay)

    @property
    def replay_identical(self) -> bool:
        return all(d.empty for d in self.replay)

    @property
    def ok(self) -> bool:
        """True when determinism, replay and the oracle cross-check all hold."""
        return self.repeat_identical and self.replay_identical and self.oracle_agrees


class ReplicationPipeline:
    """Synthesize an export series and run the replication checks on it.

    Args:
        budget (EvalBudget | None): Evaluation limits; defaults to the settings.
        threads (int | None): Worker count for synthesis and evaluation.
        optimize (bool | None): Reorder conjunctions; defaults to the settings.

    """

    def __init__(
        self,
        budget: EvalBudget | None = None,
        *,
        threads: int | None = None,
        optimize: bool | None = None,
    ) -> None:
        self.budget = budget or EvalBudget.from_settings()
        self.threads = threads
        self.optimize = optimize

    def run(
        self,
        params: SimParams,
        export_times: Sequence[int],
        output_dir: pathlib.Path | str,
        *,
        query: str = ANDROID_APPS_QUERY,
    ) -> ReplicationReport:
        """Execute synth -> run x N -> diff and write every artefact under `output_dir`.

        Layout: `exports/` (one exchange file per export time), `lists/`
        (origin lists with their dataset hash) and `reports/` (forge
        tables as Parquet and JSON lines).

        Returns:
            ReplicationReport: Counts, determinism and replay results.

        Raises:
            InvalidParamsError: Export times unordered or outside the simulated range.
            FpqlSyntaxError, FpqlTypeError, EvaluationError: From the query pipeline.

        """
        out = pathlib.Path(output_dir)
        for sub in ("exports", "lists", "reports"):
            (out / sub).mkdir(parents=True, exist_ok=True)

        archives = synthesize(params, export_times, threads=self.threads)
        paths = tuple(
            save_archive(a, out / "exports" / f"export-{file_stamp(a.export_timestamp)}{FILE_SUFFIX}")
            for a in archives
        )
        typed = compile_query(query, optimize=self.optimize)
        plain = compile_query(query, optimize=False)
        newest = archives[-1]

        variation: list[RunRecord] = []
        oracle_agrees = True
        for t in export_times:
            record = self._run(typed, newest, t, self.threads)
            variation.append(record)
            save_origin_list(record.origins, out / "lists" / f"variation-{file_stamp(t)}.txt", with_hash=True)
            expected = reference_select(plain, restrict_to_timestamp(newest, t))
            if expected != record.origins.urls:
                oracle_agrees = False
                log.error("reference interpreter disagrees at {}", to_rfc3339(t))
        forges = forge_matrix({run.label: run.origins for run in variation})
        export.write_parquet(forges, out / "reports" / "variation_forges.parquet")
        export.write_records(forges, out / "reports" / "variation_forges.jsonl")

        first_t = export_times[0]
        single = self._run(typed, archives[0], first_t, 1)
        parallel = self._run(typed, archives[0], first_t, self.threads)
        repeat_identical = (
            single.origins.serialize() == parallel.origins.serialize()
            and single.dataset_hash == parallel.dataset_hash
        )
        if not repeat_identical:
            log.error("repeated runs of the same fingerprint differ")

        replay: list[DiffReport] = []
        for archive in archives[1:]:
            later = self._run(typed, archive, first_t, self.threads)
            report = diff_lists(single.origins, later.origins)
            replay.append(report)
            name = f"replay-{file_stamp(archive.export_timestamp)}"
            export.write_parquet(report.forges, out / "reports" / f"{name}.parquet")
            save_origin_list(later.origins, out / "lists" / f"{name}.txt", with_hash=True)

        result = ReplicationReport(
            paths, tuple(variation), oracle_agrees, forges, repeat_identical, tuple(replay)
        )
        log.info(
            "replication: counts {}, repeat identical {}, replay precision {}",
            result.counts,
            result.repeat_identical,
            result.replay_precision,
        )
        return result

    def _run(self, typed: TypedQuery, archive: ArchiveGraph, t: int, threads: int | None) -> RunRecord:
        view = restrict_to_timestamp(archive, t)
        origins = select(typed, view, self.budget, threads=threads)
        return RunRecord(t, archive.export_timestamp, origins, origins.dataset_hash())
