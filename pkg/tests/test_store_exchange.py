import json
import random

import pytest

from pvdb.errors import (
    ExchangeFormatError,
    HashMismatchError,
    IntegrityConflictError,
    IntegrityError,
    UnsupportedFormatError,
)
from pvdb.models.archive import ArchiveGraph
from pvdb.processing.integrity import IssueKind
from pvdb.processing.merging import merge_append_only
from pvdb.simulation.forge import synthesize
from pvdb.store.exchange import load_archive, read_archive, save_archive

from conftest import assemble, make_repository


def test_save_load_round_trip(tmp_path, small_archive):
    path = save_archive(small_archive, tmp_path / "a.pvdb.jsonl")
    assert load_archive(path) == small_archive
    again = save_archive(load_archive(path), tmp_path / "b.pvdb.jsonl")
    assert again.read_bytes() == path.read_bytes()


def test_meta_only_file_is_an_empty_archive(tmp_path):
    path = save_archive(ArchiveGraph.empty(1_650_000_000), tmp_path / "empty.pvdb.jsonl")
    assert len(path.read_text().splitlines()) == 1
    loaded = load_archive(path)
    assert loaded.export_timestamp == 1_650_000_000
    assert not loaded.nodes and not loaded.origins


def test_record_order_does_not_matter(tmp_path, small_archive):
    path = save_archive(small_archive, tmp_path / "a.pvdb.jsonl")
    meta, *rest = path.read_text().splitlines()
    random.Random(0).shuffle(rest)
    shuffled = tmp_path / "shuffled.pvdb.jsonl"
    shuffled.write_text("\n".join([meta, *rest]) + "\n")
    assert load_archive(shuffled) == small_archive


def test_insertion_order_does_not_change_the_bytes(tmp_path):
    one = make_repository("https://a.example/1", revisions=2, root_ts=1, visits=(10,))
    two = make_repository("https://b.example/2", revisions=2, root_ts=1, visits=(20,))
    first = save_archive(assemble(100, one, two), tmp_path / "first.pvdb.jsonl")
    second = save_archive(assemble(100, two, one), tmp_path / "second.pvdb.jsonl")
    assert first.read_bytes() == second.read_bytes()


def test_merged_archive_only_adds_lines(tmp_path, sim_params):
    early, late = synthesize(sim_params, [1_550_000_000, 1_600_000_000], threads=1)
    merged = merge_append_only(early, late)
    early_lines = set(save_archive(early, tmp_path / "e.pvdb.jsonl").read_text().splitlines()[1:])
    merged_lines = set(save_archive(merged, tmp_path / "m.pvdb.jsonl").read_text().splitlines()[1:])
    assert early_lines <= merged_lines


def test_tampered_message_is_a_hash_mismatch(tmp_path, small_archive):
    path = save_archive(small_archive, tmp_path / "a.pvdb.jsonl")
    path.write_text(path.read_text().replace("commit 1", "commit X", 1))
    with pytest.raises(HashMismatchError):
        load_archive(path)


def test_altered_visit_breaks_the_history_digest(tmp_path, small_archive):
    path = save_archive(small_archive, tmp_path / "a.pvdb.jsonl")
    path.write_text(path.read_text().replace("1970-01-01T00:01:40Z", "1970-01-01T00:01:41Z"))
    loaded = read_archive(path)
    assert not loaded.check().ok
    with pytest.raises(IntegrityError):
        load_archive(path)


def test_parse_errors_carry_the_line_number(tmp_path, small_archive):
    path = save_archive(small_archive, tmp_path / "a.pvdb.jsonl")
    lines = path.read_text().splitlines()
    lines[2] = lines[2][:-1]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ExchangeFormatError) as info:
        load_archive(path)
    assert info.value.line == 3


def test_unknown_format_version_is_refused(tmp_path, small_archive):
    path = save_archive(small_archive, tmp_path / "a.pvdb.jsonl")
    meta, *rest = path.read_text().splitlines()
    record = json.loads(meta) | {"format_version": 99}
    path.write_text("\n".join([json.dumps(record, sort_keys=True, separators=(",", ":")), *rest]) + "\n")
    with pytest.raises(UnsupportedFormatError):
        load_archive(path)


def test_two_bodies_for_one_id_conflict(tmp_path, small_archive):
    path = save_archive(small_archive, tmp_path / "a.pvdb.jsonl")
    lines = path.read_text().splitlines()
    revision = next(i for i, line in enumerate(lines) if '"kind":"revision"' in line)
    lines.append(lines[revision].replace("commit", "Commit"))
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(IntegrityConflictError):
        read_archive(path)


@pytest.mark.parametrize(
    "old, new",
    [
        ('"kind":"meta"', '"kind": "meta"'),
        ("1970-01-01T00:01:40Z", "1970-01-01 00:01:40Z"),
        ("1970-01-01T00:01:40Z", "1970-01-01T00:01:40+00:00"),
    ],
)
def test_equivalent_but_non_canonical_lines_are_refused(tmp_path, small_archive, old, new):
    path = save_archive(small_archive, tmp_path / "a.pvdb.jsonl")
    text = path.read_text()
    assert old in text
    path.write_text(text.replace(old, new, 1))
    with pytest.raises(ExchangeFormatError):
        read_archive(path)


def test_lone_surrogate_in_author_is_reported_not_raised(tmp_path, small_archive):
    path = save_archive(small_archive, tmp_path / "a.pvdb.jsonl")
    path.write_text(path.read_text().replace("Alice <", "Alice \\udcff<", 1))
    report = read_archive(path).check()
    assert [i.kind for i in report.issues] == [IssueKind.INVALID_NODE]
    with pytest.raises(IntegrityError):
        load_archive(path)
