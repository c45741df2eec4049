import json
import os

import numpy as np
import pytest

from config.settings import DEFAULT_RUN_CONFIG
from core.errors import ConfigError
from utils.file_utils import atomic_open, format_cell, write_csv, write_json
from utils.json_utils import apply_overrides, deep_merge, load_config, parse_literal, to_jsonable


def test_deep_merge_keeps_base_untouched():
    base = {"a": {"b": 1, "c": 2}, "d": [1]}
    merged = deep_merge(base, {"a": {"b": 5}, "d": [2, 3]})
    assert merged == {"a": {"b": 5, "c": 2}, "d": [2, 3]}
    assert base == {"a": {"b": 1, "c": 2}, "d": [1]}


@pytest.mark.parametrize("text, value", [
    ("0.5", 0.5),
    ("[1,0,1]", [1, 0, 1]),
    ("true", True),
    ("null", None),
    ("Delta4", "Delta4"),
])
def test_parse_literal(text, value):
    assert parse_literal(text) == value


def test_overrides_set_nested_fields():
    config = apply_overrides({"operator": {"alpha": 0.0}}, ["operator.alpha=0.5", "grid.n=100"])
    assert config == {"operator": {"alpha": 0.5}, "grid": {"n": 100}}


@pytest.mark.parametrize("item", ["operator.alpha", "=1", "a..b=1", "operator.alpha.x=1"])
def test_bad_overrides(item):
    with pytest.raises(ConfigError):
        apply_overrides({"operator": {"alpha": 0.0}}, [item])


def test_load_config_merges_defaults(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"operator": {"alpha": 0.25}}), encoding="utf-8")
    config = load_config(str(path), ["D=2.0"])
    assert config["operator"] == {"variant": "Delta3", "alpha": 0.25}
    assert config["D"] == 2.0
    assert config["grid"] == DEFAULT_RUN_CONFIG["grid"]


@pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
def test_load_config_rejects_bad_documents(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_config(str(path))
    assert info.value.field_path == "config"


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.json"))


def test_to_jsonable():
    out = to_jsonable({"a": np.arange(2), "b": (np.float64(1.5), float("nan")), 3: np.inf})
    assert out == {"a": [0, 1], "b": [1.5, None], "3": None}


def test_format_cell():
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(3) == "3"
    assert format_cell(True) == "True"
    assert format_cell("phi") == "phi"


def test_writers_create_directories(tmp_path):
    csv_path = write_csv(str(tmp_path / "a" / "b.csv"), ("x", "y"), [[1, 0.5]])
    assert open(csv_path).read() == "x,y\n1,0.5\n"
    json_path = write_json(str(tmp_path / "c.json"), {"z": np.float64(2.0)})
    assert json.load(open(json_path)) == {"z": 2.0}


def test_failed_write_leaves_nothing(tmp_path):
    target = tmp_path / "out.csv"
    with pytest.raises(RuntimeError):
        with atomic_open(str(target)) as fh:
            fh.write("partial")
            raise RuntimeError("boom")
    assert not target.exists()
    assert os.listdir(tmp_path) == []
