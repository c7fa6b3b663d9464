"""Parameters of the synthetic forge used to produce export series."""

from __future__ import annotations

from typing import Any, Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from pvdb.utils.timefmt import parse_timestamp


def _timestamp(value: Any) -> Any:
    return parse_timestamp(value) if isinstance(value, str) else value


class SimParams(BaseModel):
    """Shape of a synthetic archive.

    Ranges are inclusive `(min, max)` pairs. Timestamps accept unix seconds or
    RFC 3339 strings, so the same JSON document works as a config file.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(ge=0, lt=2**64)
    origin_count: int = Field(ge=0)
    forge_hosts: tuple[tuple[str, float], ...] = (("github.com", 0.9), ("gitlab.com", 0.1))
    time_range: tuple[int, int]
    visits_per_origin: tuple[int, int] = (1, 4)
    revisions_per_visit_growth: tuple[int, int] = (1, 20)
    marker_file_probability: float = Field(default=0.5, ge=0.0, le=1.0)
    marker_file_name: str = "AndroidManifest.xml"
    branch_name_pool: tuple[str, ...] = ("refs/heads/main", "refs/heads/master", "refs/heads/dev")
    # Root commits are placed in this window when given, otherwise just before the first visit
    root_timestamp_range: tuple[int, int] | None = None

    @field_validator("time_range", "root_timestamp_range", mode="before")
    @classmethod
    def _parse_range(cls, value: Any) -> Any:
        if isinstance(value, (list, tuple)):
            return tuple(_timestamp(v) for v in value)
        return value

    @model_validator(mode="after")
    def _check_ranges(self) -> Self:
        start, end = self.time_range
        if start >= end:
            raise ValueError("time_range must be non-empty (start < end)")
        for name in ("visits_per_origin", "revisions_per_visit_growth"):
            low, high = getattr(self, name)
            if low > high:
                raise ValueError(f"{name}: min must be <= max")
            if low < 1:
                raise ValueError(f"{name}: min must be >= 1")
        if self.root_timestamp_range is not None:
            low, high = self.root_timestamp_range
            if low > high:
                raise ValueError("root_timestamp_range: min must be <= max")
        if not self.forge_hosts or any(w <= 0 for _, w in self.forge_hosts):
            raise ValueError("forge_hosts needs at least one host with a positive weight")
        if not self.branch_name_pool:
            raise ValueError("branch_name_pool must not be empty")
        return self
