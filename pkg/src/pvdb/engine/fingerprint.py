"""Fingerprint execution: query text + timestamp -> origin list + dataset hash."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from loguru import logger

from pvdb.config import settings
from pvdb.engine.evaluator import evaluate
from pvdb.engine.optimizer import optimize as optimize_query
from pvdb.errors import DatasetHashMismatchError, TimestampAheadError
from pvdb.models.archive import ArchiveGraph, ArchiveView, Origin
from pvdb.models.fingerprint import EvalBudget, Fingerprint, OriginList, OriginListEntry
from pvdb.processing.temporal import restrict_to_timestamp
from pvdb.query.parser import parse
from pvdb.query.typecheck import TypedQuery, typecheck
from pvdb.utils.timefmt import to_rfc3339

log = logger.bind(component="fingerprint")


@dataclass(frozen=True, slots=True)
class FingerprintResult:
    origins: OriginList
    dataset_hash: str


def compile_query(text: str, *, optimize: bool | None = None) -> TypedQuery:
    """Parse, typecheck and (unless disabled) optimize a query document.

    `optimize` defaults to `settings.optimize`.
    """
    if optimize is None:
        optimize = settings.optimize
    typed = typecheck(parse(text))
    return optimize_query(typed) if optimize else typed


def origin_list(origins: Iterable[Origin], view: ArchiveView) -> OriginList:
    """Pair every selected origin with its last snapshot in `view`."""
    entries = []
    for origin in origins:
        visit = view.last_visit(origin.url)
        assert visit is not None, "the view only holds visited origins"
        entries.append(OriginListEntry(origin.url, visit.snapshot))
    return OriginList(tuple(entries))


def select(
    query: TypedQuery,
    view: ArchiveView,
    budget: EvalBudget | None = None,
    *,
    threads: int | None = None,
) -> OriginList:
    """Evaluate a compiled query on a view and return its origin list."""
    return origin_list(evaluate(query, view, budget, threads=threads), view)


def run_fingerprint(
    fp: Fingerprint,
    archive: ArchiveGraph,
    budget: EvalBudget | None = None,
    *,
    optimize: bool | None = None,
    threads: int | None = None,
) -> FingerprintResult:
    """Run a fingerprint on one export.

    Raises:
        TimestampAheadError: The fingerprint is newer than the export.
        DatasetHashMismatchError: `fp.dataset_hash` is set and differs from the result.
        FpqlSyntaxError, FpqlTypeError, EvaluationError: From the query pipeline.

    """
    if fp.timestamp > archive.export_timestamp:
        raise TimestampAheadError(to_rfc3339(fp.timestamp), to_rfc3339(archive.export_timestamp))
    query = compile_query(fp.query, optimize=optimize)
    view = restrict_to_timestamp(archive, fp.timestamp)
    origins = select(query, view, budget, threads=threads)
    digest = origins.dataset_hash()
    log.info("fingerprint at {} selected {} origins, hash {}", to_rfc3339(fp.timestamp), len(origins), digest)
    if fp.dataset_hash is not None and fp.dataset_hash != digest:
        raise DatasetHashMismatchError(fp.dataset_hash, digest)
    return FingerprintResult(origins, digest)
