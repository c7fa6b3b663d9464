"""Fingerprints, origin lists and evaluation budgets.

A fingerprint is the pair (query, timestamp) that characterises a raw
dataset, optionally with the hash of the dataset it produced. Running it
yields an `OriginList`, whose canonical serialization is what the dataset
hash covers.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Any

from pydantic import BaseModel, ConfigDict, field_validator

from pvdb.config import settings
from pvdb.models.archive import Swhid
from pvdb.utils.timefmt import parse_timestamp

ORIGIN_LIST_HEADER = "pvdb-origin-list v1"
_SHA256_HEX = re.compile(r"^[0-9a-f]{64}$")


class Fingerprint(BaseModel):
    """Query text plus the timestamp at which the archive is read.

    `timestamp` accepts unix seconds or an RFC 3339 UTC string.
    `dataset_hash`, when present, is the SHA-256 the run must reproduce.
    """

    model_config = ConfigDict(frozen=True)

    query: str
    timestamp: int
    dataset_hash: str | None = None

    @field_validator("timestamp", mode="before")
    @classmethod
    def _parse_timestamp(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_timestamp(value)
        return value

    @field_validator("dataset_hash")
    @classmethod
    def _check_hash(cls, value: str | None) -> str | None:
        if value is not None and not _SHA256_HEX.match(value):
            raise ValueError("dataset_hash must be 64 lowercase hex characters")
        return value


@dataclass(frozen=True, slots=True, order=True)
class OriginListEntry:
    url: str
    snapshot: Swhid


@dataclass(frozen=True, slots=True)
class OriginList:
    """Selected origins with their last snapshot at the fingerprint time.

    Entries are kept sorted bytewise by UTF-8 url and are duplicate-free.
    """

    entries: tuple[OriginListEntry, ...] = ()

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.entries, key=lambda e: e.url.encode("utf-8")))
        urls = [e.url for e in ordered]
        if len(set(urls)) != len(urls):
            raise ValueError("origin list contains duplicate urls")
        object.__setattr__(self, "entries", ordered)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def urls(self) -> tuple[str, ...]:
        return tuple(e.url for e in self.entries)

    def as_mapping(self) -> dict[str, Swhid]:
        return {e.url: e.snapshot for e in self.entries}

    def serialize(self) -> bytes:
        """Canonical byte stream: header line, then `<url>\\t<swhid>` lines, LF-terminated."""
        lines = [ORIGIN_LIST_HEADER, *(f"{e.url}\t{e.snapshot}" for e in self.entries)]
        return ("\n".join(lines) + "\n").encode("utf-8")

    def dataset_hash(self) -> str:
        """SHA-256 hex digest of `serialize()`."""
        return hashlib.sha256(self.serialize()).hexdigest()


@dataclass(frozen=True, slots=True)
class EvalBudget:
    """Resource limits for one evaluation; every limit applies per origin."""

    max_depth: int = 1_000_000
    max_nodes: int = 500_000_000
    max_seconds: float | None = None

    def __post_init__(self) -> None:
        if self.max_depth < 1 or self.max_nodes < 1:
            raise ValueError("budget limits must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("wall-clock budget must be positive")

    @classmethod
    def from_settings(
        cls, depth: int | None = None, nodes: int | None = None, seconds: float | None = None
    ) -> EvalBudget:
        """Build a budget from explicit values, falling back to `settings`."""
        return cls(
            max_depth=depth if depth is not None else settings.budget_depth,
            max_nodes=nodes if nodes is not None else settings.budget_nodes,
            max_seconds=seconds if seconds is not None else settings.budget_seconds,
        )
