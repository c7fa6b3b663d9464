"""Origin-list files.

An origin list is stored exactly as it is hashed: the header line
`pvdb-origin-list v1`, then `<url>\\t<snapshot swhid>` per origin, every line
LF-terminated. A trailing `#dataset_hash\\t<hex>` line may follow; when it is
present, loading verifies it against the recomputed hash.
"""

from __future__ import annotations

from pathlib import Path

from loguru import logger

from pvdb.errors import DatasetHashMismatchError, ExchangeFormatError, StoreIOError
from pvdb.models.archive import Swhid
from pvdb.models.fingerprint import ORIGIN_LIST_HEADER, OriginList, OriginListEntry

HASH_LINE_PREFIX = "#dataset_hash\t"

log = logger.bind(component="store")


def render_origin_list(origins: OriginList, *, with_hash: bool = False) -> bytes:
    """Serialized list, optionally followed by its `#dataset_hash` line."""
    data = origins.serialize()
    if with_hash:
        data += f"{HASH_LINE_PREFIX}{origins.dataset_hash()}\n".encode("ascii")
    return data


def parse_origin_list(data: bytes, source: str | Path = "<stdin>") -> OriginList:
    """Parse the bytes of an origin-list file.

    Raises:
        ExchangeFormatError: Bad header, malformed line, duplicate url or unsorted input.
        DatasetHashMismatchError: The trailing hash line disagrees with the entries.

    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ExchangeFormatError(source, data[: exc.start].count(b"\n") + 1, "invalid UTF-8") from exc
    if text and not text.endswith("\n"):
        raise ExchangeFormatError(source, text.count("\n") + 1, "missing final newline")
    lines = text.split("\n")[:-1]
    if not lines or lines[0] != ORIGIN_LIST_HEADER:
        raise ExchangeFormatError(source, 1, f"expected header {ORIGIN_LIST_HEADER!r}")

    recorded_hash: str | None = None
    entries: list[OriginListEntry] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if recorded_hash is not None:
            raise ExchangeFormatError(source, lineno, "content after the dataset hash line")
        if line.startswith(HASH_LINE_PREFIX):
            recorded_hash = line.removeprefix(HASH_LINE_PREFIX)
            continue
        url, sep, swhid = line.partition("\t")
        if not sep or not url:
            raise ExchangeFormatError(source, lineno, "expected '<url>\\t<swhid>'")
        try:
            entries.append(OriginListEntry(url, Swhid.parse(swhid)))
        except ValueError as exc:
            raise ExchangeFormatError(source, lineno, str(exc)) from exc

    try:
        origins = OriginList(tuple(entries))
    except ValueError as exc:
        raise ExchangeFormatError(source, 1, str(exc)) from exc
    if origins.serialize() != "".join(f"{line}\n" for line in lines[: len(entries) + 1]).encode("utf-8"):
        raise ExchangeFormatError(source, 2, "entries are not in canonical (bytewise url) order")

    if recorded_hash is not None:
        computed = origins.dataset_hash()
        if computed != recorded_hash:
            raise DatasetHashMismatchError(recorded_hash, computed)
    return origins


def load_origin_list(path: str | Path) -> OriginList:
    """Read an origin-list file; see `parse_origin_list` for the errors raised."""
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise StoreIOError(p, exc) from exc
    origins = parse_origin_list(data, p)
    log.debug("loaded {} origins from {}", len(origins), p)
    return origins


def save_origin_list(origins: OriginList, path: str | Path, *, with_hash: bool = False) -> Path:
    p = Path(path)
    try:
        p.write_bytes(render_origin_list(origins, with_hash=with_hash))
    except OSError as exc:
        raise StoreIOError(p, exc) from exc
    return p
