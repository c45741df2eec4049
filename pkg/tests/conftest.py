import json

import pytest

from core.point_transform import PointTransform
from utils.json_utils import load_config


@pytest.fixture
def identity():
    return PointTransform.identity()


@pytest.fixture
def cubic():
    """W = x + x^3"""
    return PointTransform.polynomial([1, 0, 1])


@pytest.fixture
def monomial3():
    return PointTransform.monomial(3.0)


@pytest.fixture
def write_config(tmp_path):
    """Write a run config (merged over the defaults) into tmp_path and return its path."""

    def _write(name="run", **sections):
        doc = {"name": name, "outputs": {"directory": str(tmp_path / "out")}}
        doc.update(sections)
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def small_run(tmp_path):
    """Raw config for a quick W = x run."""
    raw = load_config(None)
    raw.update({
        "name": "small",
        "grid": {"x_min": -8.0, "x_max": 8.0, "n": 800},
        "times": [0.05, 0.1, 0.2, 0.4, 0.8],
        "outputs": {"directory": str(tmp_path / "out"), "combined_snapshots": True, "write_snapshots": True},
    })
    return raw
