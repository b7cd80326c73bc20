import enum
import json
import math

import numpy as np
import pytest

from minigraph.grid import DEFAULT_GRID, EmptyGridError, GridSpec, grid_points, sweep, thread_count
from minigraph.report import AnalysisReport, jsonable, write_csv


def test_default_grid():
    g = GridSpec.parse(DEFAULT_GRID)
    assert (g.x_min, g.x_max, g.nx, g.y_min, g.y_max, g.ny) == (-2, 2, 41, -2, 2, 41)
    assert str(g) == DEFAULT_GRID
    pts = g.points()
    assert len(pts) == len(g) == 41 * 41
    assert pts[0] == (-2.0, -2.0) and pts[-1] == (2.0, 2.0)
    assert (0.0, 0.0) in pts


@pytest.mark.parametrize("text", ["", "1:2:3", "0:1:5,0:1", "1:0:5,0:1:5", "0:1:1,0:1:5", "a:b:c,0:1:5"])
def test_bad_grids(text):
    with pytest.raises(ValueError):
        GridSpec.parse(text)


def test_explicit_point_lists():
    assert grid_points([(1, 2), (3, 4)]) == [(1.0, 2.0), (3.0, 4.0)]
    with pytest.raises(EmptyGridError, match="empty grid"):
        grid_points([])


def test_thread_count(monkeypatch):
    monkeypatch.delenv("MINIGRAPH_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("MINIGRAPH_THREADS", "6")
    assert thread_count() == 6
    assert sweep(lambda v: v * v, range(50)) == [v * v for v in range(50)]
    # unusable values fall back to serial evaluation
    for bad in ("zero", "-3", "0"):
        monkeypatch.setenv("MINIGRAPH_THREADS", bad)
        assert thread_count() == 1


class Colour(enum.Enum):
    RED = "red"


def test_jsonable():
    assert jsonable(math.inf) is None and jsonable(math.nan) is None
    assert jsonable(1 - 2j) == {"re": 1.0, "im": -2.0}
    assert jsonable(Colour.RED) == "red"
    assert jsonable(np.float64(0.5)) == 0.5 and jsonable(np.int64(3)) == 3
    assert jsonable({"a": (1, np.array([1.0, 2.0]))}) == {"a": [1, [1.0, 2.0]]}


def test_report_json_is_stable():
    rep = AnalysisReport("verify", inputs={"z": 1, "a": math.inf})
    rep.verdicts["minimality"] = "minimal"
    rep.add_error((0.5, -1.0), ValueError("bad"))
    text = rep.to_json()
    data = json.loads(text)
    assert data["inputs"] == {"a": None, "z": 1}
    assert data["errors"] == [{"x": 0.5, "y": -1.0, "error": "bad"}]
    assert rep.verdict == "minimal"
    assert text == AnalysisReport(**{k: getattr(rep, k) for k in
                                     ("command", "inputs", "checks", "verdicts", "details", "errors")}).to_json()


def test_csv_round_trips_floats(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, ["a", "b"], [(0.1, 1 / 3), (-2.0, 1e-300)])
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b"
    assert [float(v) for v in lines[1].split(",")] == [0.1, 1 / 3]
