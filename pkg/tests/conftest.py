"""Shared archive builders for the test-suite."""

from __future__ import annotations

import pytest

from pvdb.config import settings
from pvdb.models.archive import (
    ArchiveGraph,
    Directory,
    DirectoryEntry,
    Node,
    Origin,
    OriginVisit,
    Revision,
    SnapshotBranch,
)
from pvdb.models.simulation import SimParams
from pvdb.processing.hashing import content_for_bytes, new_directory, new_revision, new_snapshot
from pvdb.simulation.forge import synthesize

FILE_PERMS = 0o100644
DIR_PERMS = 0o040000

# The threshold of the Android-apps query: root commits after 2015-01-01
ANDROID_CUTOFF = 1_420_066_800
VISIT_TS = 1_600_000_000
EXPORT_TS = 1_650_000_000


@pytest.fixture(autouse=True)
def _no_progress_bars(monkeypatch):
    monkeypatch.setattr(settings, "enable_progress", False)


def make_tree(*file_names: str, subdir: str | None = None) -> tuple[Directory, list[Node]]:
    """Root directory holding `file_names`, optionally with one nested directory holding `main.java`."""
    nodes: list[Node] = []
    entries = []
    for name in file_names:
        content = content_for_bytes(name.encode() + b" contents")
        nodes.append(content)
        entries.append(DirectoryEntry(name.encode(), content.id, FILE_PERMS))
    if subdir is not None:
        leaf = content_for_bytes(b"class Main {}")
        inner = new_directory([DirectoryEntry(b"main.java", leaf.id, FILE_PERMS)])
        nodes += [leaf, inner]
        entries.append(DirectoryEntry(subdir.encode(), inner.id, DIR_PERMS))
    root = new_directory(entries)
    nodes.append(root)
    return root, nodes


def make_chain(
    length: int, *, tree: Directory, root_ts: int, label: str = "", step: int = 60
) -> list[Revision]:
    """Linear history of `length` revisions, oldest first, all sharing `tree`."""
    revisions: list[Revision] = []
    for i in range(length):
        parents = (revisions[-1].id,) if revisions else ()
        revisions.append(
            new_revision(
                tree.id,
                parents,
                author="Alice <alice@example.org>",
                author_timestamp=root_ts + i * step,
                message=f"{label} commit {i}".encode(),
            )
        )
    return revisions


def make_repository(
    url: str,
    *,
    revisions: int,
    root_ts: int,
    branch: str = "refs/heads/main",
    files: tuple[str, ...] = ("AndroidManifest.xml", "build.gradle"),
    visits: tuple[int, ...] = (VISIT_TS,),
) -> tuple[Origin, list[Node]]:
    """One origin whose every visit snapshots a single branch at the chain head."""
    tree, nodes = make_tree(*files, subdir="src")
    chain = make_chain(revisions, tree=tree, root_ts=root_ts, label=url)
    snapshot = new_snapshot([SnapshotBranch(branch.encode(), chain[-1].id)])
    origin = Origin(url, tuple(OriginVisit(ts, snapshot.id) for ts in visits))
    return origin, [*nodes, *chain, snapshot]


def assemble(export_ts: int, *repositories: tuple[Origin, list[Node]]) -> ArchiveGraph:
    nodes = [n for _, repo_nodes in repositories for n in repo_nodes]
    return ArchiveGraph.build(export_ts, nodes, [origin for origin, _ in repositories])


@pytest.fixture(scope="session")
def android_archive() -> ArchiveGraph:
    """Origins A to E; only A satisfies the Android-apps query."""
    return assemble(
        EXPORT_TS,
        make_repository("https://github.com/acme/a", revisions=1500, root_ts=1_500_000_000),
        make_repository("https://github.com/acme/b", revisions=999, root_ts=1_500_000_000),
        make_repository("https://github.com/acme/c", revisions=1500, root_ts=1_400_000_000),
        make_repository(
            "https://gitlab.com/acme/d", revisions=1500, root_ts=1_500_000_000, branch="refs/heads/dev"
        ),
        make_repository(
            "https://gitlab.com/acme/e", revisions=1500, root_ts=1_500_000_000, files=("README",)
        ),
    )


@pytest.fixture
def small_archive() -> ArchiveGraph:
    """Three short repositories with visits at 100, 200 and 300 seconds."""
    return assemble(
        1_000,
        make_repository("https://github.com/x/one", revisions=3, root_ts=10, visits=(100, 200, 300)),
        make_repository("https://github.com/x/two", revisions=2, root_ts=10, visits=(200,)),
        make_repository(
            "https://gitlab.com/y/three", revisions=1, root_ts=10, visits=(300,), files=("README",)
        ),
    )


@pytest.fixture
def sim_archive(sim_params) -> ArchiveGraph:
    """The sim_params forge exported at the end of its time range."""
    (archive,) = synthesize(sim_params, [sim_params.time_range[1]], threads=1)
    return archive


@pytest.fixture
def sim_params() -> SimParams:
    return SimParams(
        seed=7,
        origin_count=12,
        time_range=(1_500_000_000, 1_600_000_000),
        visits_per_origin=(1, 3),
        revisions_per_visit_growth=(1, 5),
    )
