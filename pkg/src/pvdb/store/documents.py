"""Fingerprint and simulation-parameter documents (JSON files)."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from pvdb.errors import ExchangeFormatError, InvalidParamsError, StoreIOError, UserError
from pvdb.models.fingerprint import Fingerprint
from pvdb.models.simulation import SimParams
from pvdb.utils.timefmt import to_rfc3339


def _read_json(path: Path) -> dict[str, Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StoreIOError(path, exc) from exc
    except UnicodeDecodeError as exc:
        raise ExchangeFormatError(path, 1, "invalid UTF-8") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ExchangeFormatError(path, exc.lineno, exc.msg) from exc
    if not isinstance(data, dict):
        raise ExchangeFormatError(path, 1, "expected a JSON object")
    return data


def _describe(exc: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
    )


def load_fingerprint(path: str | Path) -> Fingerprint:
    """Load a fingerprint file.

    The document holds `timestamp` (RFC 3339 UTC or unix seconds), `query`
    and an optional `dataset_hash`. A query of the form `@relative/path.fpql`
    is read from that file, resolved against the fingerprint's directory.

    Raises:
        StoreIOError: The fingerprint or referenced query file cannot be read.
        ExchangeFormatError: The document is not a JSON object.
        UserError: A field is missing or invalid.

    """
    p = Path(path)
    data = _read_json(p)
    query = data.get("query")
    if isinstance(query, str) and query.startswith("@"):
        query_path = p.parent / query[1:]
        try:
            data["query"] = query_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StoreIOError(query_path, exc) from exc
    try:
        return Fingerprint.model_validate(data)
    except ValidationError as exc:
        raise UserError(f"{p}: invalid fingerprint: {_describe(exc)}") from exc


def save_fingerprint(fingerprint: Fingerprint, path: str | Path) -> Path:
    """Write a fingerprint with its query inline and the timestamp in RFC 3339."""
    p = Path(path)
    doc: dict[str, Any] = {"query": fingerprint.query, "timestamp": to_rfc3339(fingerprint.timestamp)}
    if fingerprint.dataset_hash is not None:
        doc["dataset_hash"] = fingerprint.dataset_hash
    try:
        p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise StoreIOError(p, exc) from exc
    return p


def load_sim_params(path: str | Path) -> SimParams:
    """Load forge-sim parameters from a JSON document.

    Raises:
        InvalidParamsError: On unknown keys or out-of-range values.

    """
    p = Path(path)
    try:
        return SimParams.model_validate(_read_json(p))
    except ValidationError as exc:
        raise InvalidParamsError(f"{p}: {_describe(exc)}") from exc
