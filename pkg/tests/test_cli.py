import json
import pathlib

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from pvdb.cli import main
from pvdb.models.fingerprint import Fingerprint
from pvdb.store import save_archive, save_fingerprint

from conftest import assemble, make_repository

ALL = "context Graph def : query():Set(Origin) = origins->select(o | true)"


@pytest.fixture
def workspace(tmp_path: pathlib.Path, small_archive):
    save_archive(small_archive, tmp_path / "export.pvdb.jsonl")
    save_fingerprint(Fingerprint(query=ALL, timestamp=300), tmp_path / "fp.json")
    return tmp_path


def _run_list(workspace: pathlib.Path, capsysbinary, *extra: str) -> bytes:
    code = main(["run", str(workspace / "fp.json"), str(workspace / "export.pvdb.jsonl"), *extra])
    assert code == 0
    return capsysbinary.readouterr().out


def test_synth_writes_one_export_per_time(tmp_path: pathlib.Path, sim_params, capsysbinary):
    params = tmp_path / "params.json"
    params.write_text(json.dumps(sim_params.model_dump()), encoding="utf-8")
    argv = ["synth", str(params), "--at", "1550000000", "2020-09-13T12:26:40Z", "--out", str(tmp_path / "out")]

    assert main(argv) == 0
    names = sorted(p.name for p in (tmp_path / "out").iterdir())
    assert names == ["export-20190212T193320Z.pvdb.jsonl", "export-20200913T122640Z.pvdb.jsonl"]
    assert b"exports" in capsysbinary.readouterr().out

    # refuses to overwrite without --force
    assert main(argv) == 1
    assert main([*argv, "--force"]) == 0


def test_run_stdout_does_not_depend_on_threads(workspace, capsysbinary):
    single = _run_list(workspace, capsysbinary, "--threads", "1")
    parallel = _run_list(workspace, capsysbinary, "--threads", "8")
    assert single == parallel
    assert single.count(b"\n") == 4  # header and three origins


def test_emit_hash_appends_the_hash_line(workspace, capsysbinary):
    plain = _run_list(workspace, capsysbinary)
    hashed = _run_list(workspace, capsysbinary, "--emit-hash")
    assert hashed.startswith(plain)
    assert hashed[len(plain) :].startswith(b"#dataset_hash\t")


def test_wrong_expected_hash_is_a_reproduction_failure(workspace, capsysbinary):
    argv = ["run", str(workspace / "fp.json"), str(workspace / "export.pvdb.jsonl")]
    assert main([*argv, "--expect-hash", "0" * 64]) == 2
    assert capsysbinary.readouterr().out == b""


def test_extract_then_verify(workspace, capsysbinary):
    (workspace / "list.txt").write_bytes(_run_list(workspace, capsysbinary, "--emit-hash"))
    out = workspace / "ds.pvdb.jsonl"
    argv = ["extract", str(workspace / "export.pvdb.jsonl"), str(workspace / "list.txt")]

    assert main([*argv, "--at", "300", "--out", str(out)]) == 0
    assert capsysbinary.readouterr().out.startswith(str(out).encode() + b"\t")
    assert main(["verify", str(out)]) == 0
    assert capsysbinary.readouterr().out.startswith(b"ok: ")

    # the third origin has no visit at 150
    assert main([*argv, "--at", "150", "--out", str(workspace / "stale.pvdb.jsonl")]) == 1


def test_verify_flags_a_tampered_export(workspace, capsysbinary):
    path = workspace / "export.pvdb.jsonl"
    text = path.read_text(encoding="utf-8")
    assert "commit 0" in text
    path.write_text(text.replace("commit 0", "commit 9", 1), encoding="utf-8")
    assert main(["verify", str(path)]) == 3


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(data=st.data())
def test_any_single_byte_change_fails_verification(workspace, data):
    original = (workspace / "export.pvdb.jsonl").read_bytes()
    offset = data.draw(st.integers(0, len(original) - 1), label="offset")
    mask = data.draw(st.integers(1, 255), label="mask")
    flipped = bytearray(original)
    flipped[offset] ^= mask
    path = workspace / "flipped.pvdb.jsonl"
    path.write_bytes(bytes(flipped))
    assert main(["verify", str(path)]) == 3


def test_diff_of_a_list_with_itself(workspace, capsysbinary):
    (workspace / "list.txt").write_bytes(_run_list(workspace, capsysbinary))
    lst = str(workspace / "list.txt")
    assert main(["diff", lst, lst, "--format", "records"]) == 0
    lines = capsysbinary.readouterr().out.decode().splitlines()
    assert lines == ['{"precision": 1.0}']
    assert main(["diff", lst, lst]) == 0
    assert capsysbinary.readouterr().out == b"precision: 1.0000\n"


def test_stats_and_census_end_with_a_total(workspace, capsysbinary):
    (workspace / "list.txt").write_bytes(_run_list(workspace, capsysbinary))
    assert main(["stats", str(workspace / "list.txt")]) == 0
    assert b"Total" in capsysbinary.readouterr().out
    assert main(["census", str(workspace / "export.pvdb.jsonl"), "--at", "150"]) == 0
    assert b"Total" in capsysbinary.readouterr().out


def test_merge_violation_names_the_origin(tmp_path: pathlib.Path, capsysbinary):
    url = "https://github.com/x/rewritten"
    base = assemble(1000, make_repository(url, revisions=1, root_ts=10, visits=(100,)))
    delta = assemble(1000, make_repository(url, revisions=2, root_ts=10, visits=(100,)))
    save_archive(base, tmp_path / "base.pvdb.jsonl")
    save_archive(delta, tmp_path / "delta.pvdb.jsonl")

    argv = ["merge", str(tmp_path / "base.pvdb.jsonl"), str(tmp_path / "delta.pvdb.jsonl")]
    assert main([*argv, "--out", str(tmp_path / "merged.pvdb.jsonl")]) == 1
    assert url.encode() in capsysbinary.readouterr().err
    assert not (tmp_path / "merged.pvdb.jsonl").exists()


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["run"],
        ["census", "x.pvdb.jsonl", "--at", "yesterday"],
        ["run", "fp.json", "a.pvdb.jsonl", "--threads", "0"],
    ],
)
def test_usage_errors_exit_with_one(argv, capsysbinary):
    assert main(argv) == 1
    assert capsysbinary.readouterr().out == b""
