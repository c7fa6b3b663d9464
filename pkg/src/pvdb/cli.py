"""Command-line interface.

One `pvdb` binary with a subcommand per workflow step::

    pvdb synth params.json --at 2022-01-01T00:00:00Z 2022-04-24T00:00:00Z --out exports/
    pvdb run fingerprint.json exports/export-20220424T000000Z.pvdb.jsonl --emit-hash > list.txt
    pvdb extract exports/export-20220424T000000Z.pvdb.jsonl list.txt --at 2022-01-01T00:00:00Z --out ds.pvdb.jsonl
    pvdb verify ds.pvdb.jsonl

Exit codes: 0 success, 1 user error, 2 reproduction failure, 3 integrity or
internal failure. Diagnostics go to stderr; stdout carries only the command
result, so identical inputs give identical stdout bytes.
"""

from __future__ import annotations

import argparse
import pathlib
import sys
from collections.abc import Sequence
from typing import Any, NoReturn

import polars as pl
from loguru import logger

from pvdb.config import settings
from pvdb.dataset import diff_lists, extract_subgraph, forge_census, forge_stats, verify_dataset
from pvdb.engine import run_fingerprint
from pvdb.errors import PvdbError, UserError
from pvdb.models.dataset import DatasetGraph
from pvdb.models.fingerprint import EvalBudget
from pvdb.models.simulation import SimParams
from pvdb.pipeline import ANDROID_APPS_QUERY, ReplicationPipeline, ReplicationReport
from pvdb.processing.integrity import IntegrityReport
from pvdb.processing.merging import merge_append_only
from pvdb.reporting.render import record_lines, render_frame
from pvdb.simulation.forge import synthesize
from pvdb.store import (
    FILE_SUFFIX,
    load_archive,
    load_fingerprint,
    load_origin_list,
    load_sim_params,
    load_source,
    read_archive,
    render_origin_list,
    save_archive,
    save_dataset,
)
from pvdb.utils.logging import configure_logging
from pvdb.utils.timefmt import file_stamp, parse_timestamp, to_rfc3339

log = logger.bind(component="cli")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors follow the exit-code contract (1, not 2)."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UserError(f"{self.prog}: {message}")


def _timestamp(text: str) -> int:
    try:
        return parse_timestamp(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _write(data: bytes | str) -> None:
    out = sys.stdout.buffer
    out.write(data.encode("utf-8") if isinstance(data, str) else data)
    out.flush()


def _check_writable(path: pathlib.Path, force: bool) -> None:
    if path.exists() and not force:
        raise UserError(f"{path} already exists (use --force to overwrite)")


def _budget(args: argparse.Namespace) -> EvalBudget:
    return EvalBudget.from_settings(args.budget_depth, args.budget_nodes, args.budget_seconds)


def _optimize(args: argparse.Namespace) -> bool | None:
    return False if args.no_optimize else None


# --------------------------------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------------------------------


def _sim_params(args: argparse.Namespace) -> SimParams:
    params = load_sim_params(args.params)
    overrides = {
        k: v for k, v in (("seed", args.seed), ("origin_count", args.origin_count)) if v is not None
    }
    if not overrides:
        return params
    try:
        return SimParams.model_validate(params.model_dump() | overrides)
    except ValueError as exc:
        raise UserError(f"invalid parameter override: {exc}") from exc


def cmd_synth(args: argparse.Namespace) -> int:
    params = _sim_params(args)
    out = pathlib.Path(args.out)
    targets = [out / f"export-{file_stamp(t)}{FILE_SUFFIX}" for t in args.at]
    for target in targets:
        _check_writable(target, args.force)
    archives = synthesize(params, args.at, threads=args.threads)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for archive, target in zip(archives, targets, strict=True):
        save_archive(archive, target)
        rows.append(
            {
                "export": to_rfc3339(archive.export_timestamp),
                "origins": len(archive.origins),
                "nodes": len(archive.nodes),
                "file": str(target),
            }
        )
    _write(render_frame(pl.DataFrame(rows), args.format, title="exports"))
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    fingerprint = load_fingerprint(args.fingerprint)
    if args.expect_hash is not None:
        fingerprint = fingerprint.model_copy(update={"dataset_hash": args.expect_hash})
    source = load_source(args.archive)
    archive = source.graph if isinstance(source, DatasetGraph) else source
    result = run_fingerprint(
        fingerprint, archive, _budget(args), optimize=_optimize(args), threads=args.threads
    )
    if args.format == "records":
        rows: list[dict[str, Any]] = [
            {"snapshot": str(e.snapshot), "url": e.url} for e in result.origins.entries
        ]
        rows.append({"dataset_hash": result.dataset_hash})
        _write(record_lines(rows))
        return 0
    _write(render_origin_list(result.origins, with_hash=args.emit_hash))
    if not args.emit_hash:
        print(f"dataset_hash\t{result.dataset_hash}", file=sys.stderr)
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    out = pathlib.Path(args.out)
    _check_writable(out, args.force)
    source = load_source(args.archive)
    origins = load_origin_list(args.origin_list)
    dataset = extract_subgraph(source, origins, args.at, threads=args.threads)
    save_dataset(dataset, out)
    log.info(
        "extracted {} origins, {} nodes into {}", len(dataset.graph.origins), len(dataset.graph.nodes), out
    )
    _write(f"{out}\t{dataset.provenance.dataset_hash}\n")
    return 0


def _report_frame(report: IntegrityReport) -> pl.DataFrame:
    return pl.DataFrame(
        {
            "subject": [i.subject for i in report.issues],
            "kind": [str(i.kind) for i in report.issues],
            "detail": [i.detail for i in report.issues],
        },
        schema={"subject": pl.String, "kind": pl.String, "detail": pl.String},
    )


def cmd_verify(args: argparse.Namespace) -> int:
    # Every failure to even read the file counts as an integrity failure here.
    try:
        loaded = read_archive(args.archive)
    except PvdbError as exc:
        log.error("{}", exc)
        return 3
    report = loaded.check()
    if loaded.provenance is not None and report.ok:
        report = verify_dataset(DatasetGraph(loaded.archive, loaded.provenance))
    if report.ok:
        if args.format == "records":
            _write(record_lines([{"ok": True}]))
        else:
            _write(f"ok: {len(loaded.archive.nodes)} nodes, {len(loaded.archive.origins)} origins\n")
        return 0
    _write(render_frame(_report_frame(report), args.format, title="integrity issues"))
    log.error("{} integrity issue(s) in {}", len(report.issues), args.archive)
    return 3


def cmd_diff(args: argparse.Namespace) -> int:
    report = diff_lists(load_origin_list(args.list_a), load_origin_list(args.list_b))
    changes = pl.DataFrame(
        {
            "change": ["added"] * len(report.added)
            + ["removed"] * len(report.removed)
            + ["changed"] * len(report.changed),
            "url": [*report.added, *report.removed, *report.changed],
        },
        schema={"change": pl.String, "url": pl.String},
    )
    if args.format == "records":
        rows = [*changes.iter_rows(named=True), {"precision": report.precision}]
        _write(record_lines(rows))
        return 0
    precision = "-" if report.precision is None else f"{report.precision:.4f}"
    if not report.empty:
        _write(render_frame(changes, title="changes"))
        _write(render_frame(report.forges, title="forges"))
    _write(f"precision: {precision}\n")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    frame = forge_stats(load_origin_list(args.origin_list))
    _write(render_frame(frame, args.format, title="origins per forge", total=True))
    return 0


def cmd_census(args: argparse.Namespace) -> int:
    archive = load_archive(args.archive)
    t = args.at if args.at is not None else archive.export_timestamp
    frame = forge_census(archive, t)
    _write(render_frame(frame, args.format, title=f"census at {to_rfc3339(t)}", total=True))
    return 0


def cmd_merge(args: argparse.Namespace) -> int:
    out = pathlib.Path(args.out)
    _check_writable(out, args.force)
    merged = merge_append_only(load_archive(args.base), load_archive(args.delta))
    save_archive(merged, out)
    _write(f"{out}\t{len(merged.nodes)} nodes\t{len(merged.origins)} origins\n")
    return 0


def _replication_summary(report: ReplicationReport, fmt: str) -> str:
    runs = pl.DataFrame(
        {
            "fingerprint": [r.label for r in report.variation],
            "origins": [len(r.origins) for r in report.variation],
            "dataset_hash": [r.dataset_hash for r in report.variation],
        }
    )
    replay = pl.DataFrame(
        {
            "export": [p.name for p in report.exports[1:]],
            "precision": report.replay_precision,
        },
        schema={"export": pl.String, "precision": pl.Float64},
    )
    if fmt == "records":
        summary = {
            "oracle_agrees": report.oracle_agrees,
            "repeat_identical": report.repeat_identical,
            "replay_identical": report.replay_identical,
        }
        return record_lines([*runs.iter_rows(named=True), *replay.iter_rows(named=True), summary])
    return "".join(
        [
            render_frame(runs, title="variation: results per fingerprint time"),
            render_frame(report.forges, title="variation: origins per forge", total=True),
            f"determinism: repeated runs identical: {report.repeat_identical}\n",
            render_frame(replay, title="replay on later exports"),
            f"replay identical: {report.replay_identical}\n",
            f"reference interpreter agrees: {report.oracle_agrees}\n",
        ]
    )


def cmd_replicate(args: argparse.Namespace) -> int:
    params = _sim_params(args)
    query = ANDROID_APPS_QUERY
    if args.query is not None:
        try:
            query = pathlib.Path(args.query).read_text(encoding="utf-8")
        except OSError as exc:
            raise UserError(f"cannot read query file {args.query}: {exc}") from exc
    pipeline = ReplicationPipeline(_budget(args), threads=args.threads, optimize=_optimize(args))
    report = pipeline.run(params, args.at, args.out, query=query)
    _write(_replication_summary(report, args.format))
    if not (report.repeat_identical and report.replay_identical):
        return 2
    return 0 if report.oracle_agrees else 3


# --------------------------------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------------------------------


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    group = common.add_argument_group("global options")
    group.add_argument("--threads", type=_positive, default=None, help="worker count (default: PVDB_THREADS or all cores)")
    group.add_argument("--no-optimize", action="store_true", help="evaluate conjunctions in source order")
    group.add_argument("--budget-depth", type=_positive, default=None, help="maximum call depth per origin")
    group.add_argument("--budget-nodes", type=_positive, default=None, help="maximum node visits per origin")
    group.add_argument("--budget-seconds", type=float, default=None, help="wall-clock limit per origin")
    group.add_argument("--format", choices=("table", "records"), default="table", help="output format")
    group.add_argument("--log-level", default=None, help="stderr log level (default: PVDB_LOG_LEVEL)")
    group.add_argument("--no-progress", action="store_true", help="disable progress bars")
    return common


def _add_sim_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("params", type=pathlib.Path, help="simulation parameters (JSON)")
    p.add_argument("--at", type=_timestamp, nargs="+", required=True, help="export times, increasing")
    p.add_argument("--seed", type=int, default=None, help="override the parameter file's seed")
    p.add_argument("--origin-count", type=int, default=None, help="override the origin count")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog="pvdb", description="Reproducible repository datasets from archive exports.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("synth", parents=[common], help="synthesize an export series")
    _add_sim_options(p)
    p.add_argument("--out", type=pathlib.Path, required=True, help="output directory")
    p.add_argument("--force", action="store_true", help="overwrite existing exports")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("run", parents=[common], help="run a fingerprint on an export")
    p.add_argument("fingerprint", type=pathlib.Path)
    p.add_argument("archive", type=pathlib.Path)
    p.add_argument("--emit-hash", action="store_true", help="append the dataset hash line to stdout")
    p.add_argument("--expect-hash", default=None, help="dataset hash the run must reproduce")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("extract", parents=[common], help="extract the dataset graph of an origin list")
    p.add_argument("archive", type=pathlib.Path)
    p.add_argument("origin_list", type=pathlib.Path)
    p.add_argument("--at", type=_timestamp, required=True, help="fingerprint timestamp")
    p.add_argument("--out", type=pathlib.Path, required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("verify", parents=[common], help="check an archive or dataset file")
    p.add_argument("archive", type=pathlib.Path)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("diff", parents=[common], help="compare two origin lists")
    p.add_argument("list_a", type=pathlib.Path)
    p.add_argument("list_b", type=pathlib.Path)
    p.set_defaults(handler=cmd_diff)

    p = sub.add_parser("stats", parents=[common], help="origins per forge of a list")
    p.add_argument("origin_list", type=pathlib.Path)
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("census", parents=[common], help="origins per forge of an export")
    p.add_argument("archive", type=pathlib.Path)
    p.add_argument("--at", type=_timestamp, default=None, help="census time (default: export time)")
    p.set_defaults(handler=cmd_census)

    p = sub.add_parser("merge", parents=[common], help="append-only merge of two exports")
    p.add_argument("base", type=pathlib.Path)
    p.add_argument("delta", type=pathlib.Path)
    p.add_argument("--out", type=pathlib.Path, required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(handler=cmd_merge)

    p = sub.add_parser("replicate-rq", parents=[common], help="synth, run and diff in one go")
    _add_sim_options(p)
    p.add_argument("--out", type=pathlib.Path, required=True, help="output directory")
    p.add_argument("--query", type=pathlib.Path, default=None, help="query file (default: Android apps)")
    p.set_defaults(handler=cmd_replicate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the `pvdb` console script; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
    except PvdbError as exc:
        print(exc, file=sys.stderr)
        return exc.exit_code
    configure_logging(args.log_level)
    if args.no_progress:
        settings.enable_progress = False
    try:
        return args.handler(args)
    except PvdbError as exc:
        log.error("{}", exc)
        return exc.exit_code
    except Exception:
        log.exception("internal error")
        return 3


if __name__ == "__main__":
    sys.exit(main())
