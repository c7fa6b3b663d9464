import json

import pytest

from pvdb.errors import InvalidParamsError, UserError
from pvdb.models.fingerprint import Fingerprint
from pvdb.store.documents import load_fingerprint, load_sim_params, save_fingerprint


def test_fingerprint_round_trip(tmp_path):
    fp = Fingerprint(query="context Graph def : query() : Set(Origin) = origins", timestamp=1_650_000_000)
    path = save_fingerprint(fp, tmp_path / "fp.json")
    assert json.loads(path.read_text())["timestamp"] == "2022-04-15T05:20:00Z"
    assert load_fingerprint(path) == fp


def test_query_can_live_in_a_separate_file(tmp_path):
    (tmp_path / "q.fpql").write_text("context Graph\ndef : query() : Set(Origin) = origins\n")
    (tmp_path / "fp.json").write_text(json.dumps({"timestamp": "2022-04-24T00:00:00Z", "query": "@q.fpql"}))
    fp = load_fingerprint(tmp_path / "fp.json")
    assert fp.query.startswith("context Graph")
    assert fp.timestamp == 1_650_758_400


def test_bad_dataset_hash_is_a_user_error(tmp_path):
    (tmp_path / "fp.json").write_text(json.dumps({"timestamp": 0, "query": "x", "dataset_hash": "ABC"}))
    with pytest.raises(UserError, match="dataset_hash"):
        load_fingerprint(tmp_path / "fp.json")


def test_sim_params_reject_unknown_keys_and_bad_ranges(tmp_path):
    base = {"seed": 1, "origin_count": 3, "time_range": ["2020-01-01T00:00:00Z", "2021-01-01T00:00:00Z"]}
    (tmp_path / "ok.json").write_text(json.dumps(base))
    assert load_sim_params(tmp_path / "ok.json").time_range == (1_577_836_800, 1_609_459_200)

    (tmp_path / "extra.json").write_text(json.dumps(base | {"colour": "red"}))
    with pytest.raises(InvalidParamsError):
        load_sim_params(tmp_path / "extra.json")

    (tmp_path / "prob.json").write_text(json.dumps(base | {"marker_file_probability": 1.5}))
    with pytest.raises(InvalidParamsError):
        load_sim_params(tmp_path / "prob.json")
