import json
import math

import numpy as np

from qpspectra.reporting import (atomic_write, svg_curves, svg_profile, svg_scatter, tagged,
                                 write_json, write_points_csv, write_rows_csv)


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "a.txt"
    atomic_write(target, "one")
    atomic_write(target, "two")
    assert target.read_text() == "two"
    assert [p.name for p in target.parent.iterdir()] == ["a.txt"]


def test_points_csv_round_trips_floats(tmp_path):
    pts = np.array([0.1 + 1 / 3 * 1j, -2e-300 + 5j])
    write_points_csv(tmp_path / "p.csv", [("a", pts), ("b", [0j])])
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "re,im,tag"
    re, im, tag = lines[1].split(",")
    assert float(re) == 0.1 and float(im) == 1 / 3 and tag == "a"
    assert lines[-1].endswith(",b")


def test_rows_csv(tmp_path):
    write_rows_csv(tmp_path / "r.csv", ["n", "c"], [(0, 1.0), (1, 2.5)])
    assert (tmp_path / "r.csv").read_text() == "n,c\n0.0,1.0\n1.0,2.5\n"


def test_json_sorted_and_tagged(tmp_path):
    write_json(tmp_path / "r.json", {"b": tagged(np.float64(1.5), 0), "a": [np.int64(2), math.inf],
                                     "z": 1 + 2j})
    text = (tmp_path / "r.json").read_text()
    data = json.loads(text)
    assert list(data) == ["a", "b", "z"]
    assert data == {"a": [2, "inf"], "b": {"value": 1.5, "tolerance": 0}, "z": [1.0, 2.0]}


def test_svg_self_contained(tmp_path):
    svg_scatter(tmp_path / "s.svg", [0, 1j, 1 + 1j])
    svg_curves(tmp_path / "c.svg", [np.exp(1j * np.linspace(0, 1, 10))], markers=[0j])
    svg_profile(tmp_path / "p.svg", [0.1, 0.01], [1.0, 0.1])
    for name in ("s.svg", "c.svg", "p.svg"):
        text = (tmp_path / name).read_text()
        assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
        assert "href" not in text
