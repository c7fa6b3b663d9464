import hashlib

import pytest

from pvdb.errors import InvalidNodeError
from pvdb.models.archive import Directory, DirectoryEntry, NodeType, SnapshotBranch, Swhid
from pvdb.processing.hashing import (
    compute_swhid,
    content_for_bytes,
    manifest,
    new_directory,
    new_release,
    new_revision,
    new_snapshot,
)

EMPTY_DIRECTORY = "swh:1:dir:8b71f7f8dc2a64b537b5520560c19510c835adf4"


def _field(name: str, value: bytes) -> bytes:
    return name.encode() + b":" + str(len(value)).encode() + b":" + value


def _sha1(data: bytes) -> str:
    return hashlib.sha1(data).hexdigest()


def test_empty_directory_has_a_fixed_id():
    assert manifest(new_directory([])) == b"dir\n"
    assert str(new_directory([]).id) == EMPTY_DIRECTORY


def test_chain_matches_handwritten_manifests():
    # encode content -> directory -> revision independently of the library
    cnt = content_for_bytes(b"hello")
    payload = hashlib.sha256(b"hello").hexdigest().encode()
    cnt_hex = _sha1(b"cnt\n" + _field("length", b"5") + b"\n" + _field("payload", payload))
    assert cnt.id.hex == cnt_hex

    directory = new_directory([DirectoryEntry(b"hello.txt", cnt.id, 0o100644)])
    entry = b"6:100644" + b"3:cnt" + b"41:" + cnt_hex.encode() + b"c" + b"9:hello.txt"
    dir_hex = _sha1(b"dir\n" + _field("entry", entry))
    assert directory.id.hex == dir_hex

    revision = new_revision(directory.id, author="Alice", author_timestamp=1500000000, message=b"init")
    rev_manifest = b"rev\n" + b"\n".join(
        [
            _field("tree", dir_hex.encode() + b"d"),
            _field("author", b"Alice"),
            _field("author_ts", b"1500000000"),
            _field("committer", b"Alice"),
            _field("committer_ts", b"1500000000"),
            _field("message", b"init"),
        ]
    )
    assert revision.id == Swhid(NodeType.REVISION, bytes.fromhex(_sha1(rev_manifest)))


def test_revisions_differing_only_in_message_differ():
    tree = new_directory([])
    a = new_revision(tree.id, message=b"a")
    b = new_revision(tree.id, message=b"b")
    assert a.id != b.id


def test_builders_sort_entries_and_branches():
    c = content_for_bytes(b"x")
    d = new_directory([DirectoryEntry(b"z", c.id, 0o100644), DirectoryEntry(b"a", c.id, 0o100644)])
    assert [e.name for e in d.entries] == [b"a", b"z"]
    rev = new_revision(new_directory([]).id)
    snp = new_snapshot([SnapshotBranch(b"refs/heads/b", rev.id), SnapshotBranch(b"refs/heads/a", rev.id)])
    assert [b.name for b in snp.branches] == [b"refs/heads/a", b"refs/heads/b"]
    assert compute_swhid(snp) == snp.id


def test_unsorted_entries_are_rejected_not_resorted():
    c = content_for_bytes(b"x")
    unsorted = Directory(
        new_directory([]).id,
        (DirectoryEntry(b"z", c.id, 0o100644), DirectoryEntry(b"a", c.id, 0o100644)),
    )
    with pytest.raises(InvalidNodeError, match="not sorted"):
        compute_swhid(unsorted)


def test_duplicate_entry_names_are_rejected():
    c = content_for_bytes(b"x")
    dup = Directory(
        new_directory([]).id, (DirectoryEntry(b"a", c.id, 0o100644), DirectoryEntry(b"a", c.id, 0o100644))
    )
    with pytest.raises(InvalidNodeError, match="duplicate"):
        manifest(dup)


def test_release_cannot_target_a_snapshot():
    snp = new_snapshot([])
    with pytest.raises(InvalidNodeError):
        new_release("v1", snp.id)


def test_swhid_parse_round_trips_rendering():
    assert str(Swhid.parse(EMPTY_DIRECTORY)) == EMPTY_DIRECTORY
    with pytest.raises(ValueError):
        Swhid.parse("swh:1:dir:ABC")
