"""RFC 3339 conversions for the unix-second timestamps used in memory."""

from __future__ import annotations

from datetime import UTC, datetime

_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def to_rfc3339(ts: int) -> str:
    """Render unix seconds as `YYYY-MM-DDTHH:MM:SSZ`."""
    return datetime.fromtimestamp(ts, tz=UTC).strftime(_FORMAT)


def from_rfc3339(text: str) -> int:
    """Parse an RFC 3339 UTC timestamp (`Z` suffix or `+00:00`) into unix seconds.

    Raises:
        ValueError: If the text is not a UTC RFC 3339 timestamp or has sub-second precision.

    """
    value = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if value.tzinfo is None or value.utcoffset() is None or value.utcoffset().total_seconds() != 0:
        raise ValueError(f"timestamp {text!r} is not in UTC")
    if value.microsecond:
        raise ValueError(f"timestamp {text!r} has sub-second precision")
    return int(value.timestamp())


def parse_timestamp(text: str) -> int:
    """Accept either unix seconds or an RFC 3339 UTC timestamp."""
    stripped = text.strip()
    if stripped.lstrip("-").isdigit():
        return int(stripped)
    return from_rfc3339(stripped)


def file_stamp(ts: int) -> str:
    """Compact, filename-safe rendering (`20220424T000000Z`)."""
    return datetime.fromtimestamp(ts, tz=UTC).strftime("%Y%m%dT%H%M%SZ")
