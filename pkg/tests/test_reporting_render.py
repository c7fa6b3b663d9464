import json

import polars as pl

from pvdb.reporting.render import record_lines, render_frame, table_text

FORGES = pl.DataFrame({"host": ["github.com", "gitlab.com"], "origins": [3, 2]})


def test_table_has_header_rows_and_total():
    text = render_frame(FORGES, "table", title="forges", total=True)
    assert text.splitlines()[0].strip() == "forges"
    assert "github.com" in text and "gitlab.com" in text
    total_line = next(line for line in text.splitlines() if "Total" in line)
    assert total_line.rstrip().endswith("5 |")


def test_table_output_is_byte_stable():
    assert table_text(FORGES) == table_text(FORGES.clone())
    assert "\x1b" not in table_text(FORGES)


def test_records_are_sorted_json_lines():
    text = render_frame(FORGES, "records", total=True)
    rows = [json.loads(line) for line in text.splitlines()]
    assert rows[-1] == {"host": "Total", "origins": 5}
    assert text.splitlines()[0] == '{"host": "github.com", "origins": 3}'


def test_nulls_and_floats_render_as_cells():
    frame = pl.DataFrame({"host": ["a"], "percent": [None]}, schema={"host": pl.String, "percent": pl.Float64})
    assert " - " in table_text(frame)
    assert "12.5" in table_text(pl.DataFrame({"host": ["a"], "percent": [12.5]}))
    assert record_lines([{"b": 1, "a": "é"}]) == '{"a": "é", "b": 1}\n'
