import pytest

from pvdb.utils.timefmt import file_stamp, from_rfc3339, parse_timestamp, to_rfc3339


def test_rfc3339_both_ways():
    assert to_rfc3339(1_650_000_000) == "2022-04-15T05:20:00Z"
    assert from_rfc3339("2022-04-15T05:20:00Z") == 1_650_000_000
    assert from_rfc3339("2022-04-15T05:20:00+00:00") == 1_650_000_000
    assert to_rfc3339(0) == "1970-01-01T00:00:00Z"


@pytest.mark.parametrize(
    "text",
    ["2022-04-15T07:20:00+02:00", "2022-04-15T05:20:00", "2022-04-15T05:20:00.5Z", "yesterday"],
)
def test_non_utc_or_fractional_timestamps_are_rejected(text):
    with pytest.raises(ValueError):
        from_rfc3339(text)


def test_parse_timestamp_accepts_unix_seconds():
    assert parse_timestamp(" 1650000000 ") == 1_650_000_000
    assert parse_timestamp("2022-04-15T05:20:00Z") == 1_650_000_000


def test_file_stamp():
    assert file_stamp(1_650_758_400) == "20220424T000000Z"
