import json
import pathlib

import polars as pl
import pytest

from pvdb.reporting.export import write_parquet, write_records


def test_write_parquet_creates_file(tmp_path: pathlib.Path):
    df = pl.DataFrame({"host": ["github.com", "gitlab.com"], "origins": [3, 2]})
    p = tmp_path / "reports" / "forges.parquet"
    res = write_parquet(df, p)
    assert res.exists()
    assert pl.read_parquet(res).equals(df)


def test_write_parquet_refuses_a_directory(tmp_path: pathlib.Path):
    with pytest.raises(ValueError):
        write_parquet(pl.DataFrame({"a": [1]}), tmp_path)


def test_write_records_adds_suffix_and_sorts_keys(tmp_path: pathlib.Path):
    df = pl.DataFrame({"origins": [3], "host": ["github.com"]})
    res = write_records(df, tmp_path / "forges.txt")
    assert res.name == "forges.jsonl"
    lines = res.read_text(encoding="utf-8").splitlines()
    assert lines == ['{"host": "github.com", "origins": 3}']
    assert json.loads(lines[0]) == {"host": "github.com", "origins": 3}
