import csv
import json
import math

import numpy as np
import pytest

from qpspectra.approximation import tail_bound
from qpspectra.cli import ConfigError, main, parse_config
from qpspectra.spectra import hausdorff_distance

TEST_SYMBOL = {"c0": [0, 2], "terms": [{"c": [0.5, 0], "gamma": 1}]}


def write_config(tmp_path, cfg, name="job.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def read_points(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows]), [r["tag"] for r in rows]


class TestParseConfig:
    def test_minimal_defaults(self):
        cfg = parse_config('{"alpha": 0, "symbol": {"c0": [0, 2], "terms": []}}')
        assert cfg["p"] == 1.0
        assert cfg["series"]["eps_target"] > 0
        assert cfg["grid"]["t_max"] == "auto"
        assert set(cfg["outputs"]["formats"]) == {"csv", "svg", "json"}

    def test_alpha_bound(self):
        with pytest.raises(ConfigError, match="alpha"):
            parse_config('{"alpha": -1.5, "symbol": {"c0": [0, 2]}}')

    def test_gamma_positive(self):
        with pytest.raises(ConfigError, match="gamma"):
            parse_config('{"alpha": 0, "symbol": {"c0": [0, 2], '
                         '"terms": [{"c": [1, 0], "gamma": 0}]}}')

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_config('{"alpha": 0, "symbol": {"c0": [0, 2]}, "colour": "blue"}')

    def test_not_json(self):
        with pytest.raises(ConfigError):
            parse_config("{alpha: 0")

    @pytest.mark.parametrize("field,value", [("series", {"eps_target": 0}),
                                             ("range", {"epsilon": -0.1})])
    def test_positive_fields(self, field, value):
        cfg = {"alpha": 0, "symbol": {"c0": [0, 2]}, field: value}
        with pytest.raises(ConfigError, match=field):
            parse_config(json.dumps(cfg))


class TestRun:
    def test_series_report(self, tmp_path):
        cfg = {"alpha": 0, "symbol": TEST_SYMBOL, "series": {"eps_target": 1e-6},
               "outputs": {"dir": "out"}}
        assert main(["series", "--config", str(write_config(tmp_path, cfg))]) == 0
        rep = json.loads((tmp_path / "out" / "series_report.json").read_text())
        plan = rep["plan"]
        assert plan["beta"]["value"] == pytest.approx(2.0)
        assert plan["delta"]["value"] == pytest.approx(0.25)
        assert plan["M"]["value"] == 12  # tail(11) = 1.06e-6 misses the target
        budget = rep["error_budget"]
        assert budget["analytic_tail"]["value"] == tail_bound(12, plan["delta"]["value"], 0.0)
        assert budget["discretization_estimate"]["value"] < 1e-4
        assert len(rep["provenance"]["config_sha256"]) == 64

    def test_every_number_tagged(self, tmp_path):
        cfg = {"alpha": 0, "symbol": TEST_SYMBOL, "outputs": {"dir": "out"}}
        main(["series", "--config", str(write_config(tmp_path, cfg))])
        rep = json.loads((tmp_path / "out" / "series_report.json").read_text())

        def walk(node):
            if isinstance(node, dict):
                if "value" in node:
                    assert "tolerance" in node
                    return
                for v in node.values():
                    walk(v)
            elif isinstance(node, (int, float)) and not isinstance(node, bool):
                raise AssertionError(f"untagged number {node}")

        walk({k: v for k, v in rep.items() if k not in ("provenance", "conventions")})

    def test_spectrum_constant(self, tmp_path):
        cfg = {"alpha": 0, "symbol": {"c0": [0, 2]}, "spectrum": {"t_count": 20000},
               "outputs": {"dir": "out"}}
        assert main(["spectrum", "--config", str(write_config(tmp_path, cfg))]) == 0
        pts, tags = read_points(tmp_path / "out" / "spectrum.csv")
        assert tags[-1] == "zero" and pts[-1] == 0
        assert np.all(pts.imag == 0) and np.all((pts.real >= 0) & (pts.real <= 1))
        assert hausdorff_distance(pts, np.linspace(0, 1, 100001)) <= 1e-3
        svg = (tmp_path / "out" / "spectrum.svg").read_text()
        assert svg.startswith("<svg") and "<polyline" in svg and "href" not in svg

    def test_range_circle(self, tmp_path):
        cfg = {"alpha": 0, "symbol": TEST_SYMBOL, "range": {"epsilon": 0.02},
               "outputs": {"dir": "out"}}
        assert main(["range", "--config", str(write_config(tmp_path, cfg))]) == 0
        pts, _ = read_points(tmp_path / "out" / "range.csv")
        circle = 2j + 0.5 * np.exp(2j * np.pi * np.arange(20000) / 20000)
        assert hausdorff_distance(pts, circle) <= 0.04

    def test_range_from_samples(self, tmp_path):
        from qpspectra.symbols import boundary_nodes
        x = boundary_nodes(1e4)
        v = 2j + 1.0 / (x + 1j)
        np.savetxt(tmp_path / "samples.csv", np.column_stack([x, v.real, v.imag]),
                   delimiter=",", header="x,re,im", comments="")
        cfg = {"alpha": 0, "symbol": {"samples": "samples.csv"}, "outputs": {"dir": "out"}}
        assert main(["range", "--config", str(write_config(tmp_path, cfg))]) == 0
        pts, _ = read_points(tmp_path / "out" / "range.csv")
        assert np.abs(pts - 2j).max() <= 0.02

    def test_vmo(self, tmp_path):
        cfg = {"alpha": 0, "symbol": TEST_SYMBOL, "vmo": {"r_levels": [0.9, 0.99]},
               "outputs": {"dir": "out"}}
        assert main(["vmo", "--config", str(write_config(tmp_path, cfg))]) == 0
        lines = (tmp_path / "out" / "vmo.csv").read_text().splitlines()
        assert lines[0] == "r,mean_oscillation" and len(lines) == 3

    def test_deterministic(self, tmp_path):
        cfg = {"alpha": 0, "symbol": TEST_SYMBOL, "outputs": {"dir": "out"}}
        path = write_config(tmp_path, cfg)
        outs = []
        for k in range(2):
            out = tmp_path / f"run{k}"
            for sub in ("range", "series", "spectrum"):
                assert main([sub, "--config", str(path), "--out", str(out)]) == 0
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())
                         if p.suffix in (".csv", ".json")})
        assert outs[0] == outs[1] and len(outs[0]) >= 5

    def test_validate_subset(self, tmp_path, capsys):
        cfg = {"alpha": 0, "symbol": TEST_SYMBOL, "validate": {"criteria": [9]},
               "outputs": {"dir": "out"}}
        assert main(["validate", "--config", str(write_config(tmp_path, cfg))]) == 0
        assert "[PASS] criterion  9" in capsys.readouterr().out
        rep = json.loads((tmp_path / "out" / "validate_report.json").read_text())
        assert rep["all_passed"] is True


class TestExitCodes:
    def test_config_error(self, tmp_path):
        path = write_config(tmp_path, {"alpha": -1.5, "symbol": {"c0": [0, 2]}})
        assert main(["range", "--config", str(path)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["range", "--config", str(tmp_path / "nope.json")]) == 2

    def test_infeasible(self, tmp_path):
        path = write_config(tmp_path, {"alpha": 0, "symbol": {
            "c0": [0, 1], "terms": [{"c": [2, 0], "gamma": 1}]}})
        assert main(["series", "--config", str(path), "--out", str(tmp_path)]) == 3

    def test_incommensurable(self, tmp_path):
        sym = {"c0": [0, 3], "terms": [{"c": [0.5, 0], "gamma": 1},
                                       {"c": [0.25, 0], "gamma": math.sqrt(2)}]}
        path = write_config(tmp_path, {"alpha": 0, "symbol": sym})
        assert main(["series", "--config", str(path), "--out", str(tmp_path)]) == 4

    def test_bad_seed_grid(self, tmp_path):
        path = write_config(tmp_path, {"alpha": 0, "symbol": TEST_SYMBOL})
        assert main(["series", "--config", str(path), "--out", str(tmp_path),
                     "--seed-grid", "0.013"]) == 4

    def test_validate_failure(self, tmp_path, monkeypatch):
        from qpspectra import validation
        failing = validation.CriterionResult(99, "forced", False, 1.0, 0.0)
        monkeypatch.setattr(validation, "run_all", lambda numbers=None: [failing])
        path = write_config(tmp_path, {"alpha": 0, "symbol": TEST_SYMBOL})
        assert main(["validate", "--config", str(path), "--out", str(tmp_path)]) == 5
