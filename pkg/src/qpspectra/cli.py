"""``qpspectra`` batch front end.

    qpspectra <spectrum|series|range|vmo|validate> --config job.json [--out DIR] [--seed-grid DT]

Exit codes: 0 success, 2 configuration error, 3 infeasible symbol,
4 incommensurable frequencies, 5 failed diagnostic in ``validate``.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import logging
import math
import os
import sys
from contextlib import nullcontext
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .approximation import assemble_series, plan_series
from .operators import IncommensurableGridError, grid_for_symbol
from .reporting import (svg_curves, svg_profile, svg_scatter, tagged, write_json,
                        write_points_csv, write_rows_csv)
from .spaces import fourier_norm, inverse_cayley, pw_forward
from .spectra import essential_spectrum_formula, hausdorff_distance, vmo_profile
from .symbols import (ExpPolySymbol, InfeasibleSymbolError, SampledBoundarySymbol,
                      essential_range_exppoly, essential_range_sampled, im_lower_bound,
                      sample_boundary)

log = logging.getLogger("qpspectra")

EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_GRID, EXIT_VALIDATE = 2, 3, 4, 5

_NUM = {"type": "number"}
_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["alpha", "symbol"],
    "properties": {
        "alpha": {"type": "number", "exclusiveMinimum": -1},
        "symbol": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["c0"],
                 "properties": {
                     "c0": _PAIR,
                     "terms": {"type": "array", "items": {
                         "type": "object", "additionalProperties": False,
                         "required": ["c", "gamma"],
                         "properties": {"c": _PAIR,
                                        "gamma": {"type": "number", "exclusiveMinimum": 0}}}}}},
                {"type": "object", "additionalProperties": False, "required": ["samples"],
                 "properties": {"samples": {"type": "string"}}},
            ]
        },
        "p": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
        "series": {"type": "object", "additionalProperties": False, "properties": {
            "eps_target": {"type": "number", "exclusiveMinimum": 0, "default": 1e-8}}},
        "grid": {"type": "object", "additionalProperties": False, "properties": {
            "t_count": {"type": "integer", "minimum": 2, "maximum": 2048, "default": 400},
            "t_max": {"oneOf": [{"type": "number", "exclusiveMinimum": 0},
                                {"const": "auto"}], "default": "auto"}}},
        "range": {"type": "object", "additionalProperties": False, "properties": {
            "epsilon": {"type": "number", "exclusiveMinimum": 0, "default": 0.02},
            "n_schedule": {"type": "array", "minItems": 1,
                           "items": {"type": "number", "minimum": 0},
                           "default": [10, 100, 1000, 4000]},
            "X": {"type": "number", "exclusiveMinimum": 1, "default": 1e4}}},
        "spectrum": {"type": "object", "additionalProperties": False, "properties": {
            "t_max": {"oneOf": [{"type": "number", "exclusiveMinimum": 0},
                                {"const": "auto"}], "default": "auto"},
            "t_count": {"type": "integer", "minimum": 2, "default": 400}}},
        "vmo": {"type": "object", "additionalProperties": False, "properties": {
            "r_levels": {"type": "array", "minItems": 1,
                         "items": {"type": "number", "exclusiveMinimum": 0,
                                   "exclusiveMaximum": 1},
                         "default": [0.9, 0.99, 0.999, 0.9999]},
            "theta_count": {"type": "integer", "minimum": 1, "default": 16}}},
        "validate": {"type": "object", "additionalProperties": False, "properties": {
            "criteria": {"type": "array", "items": {"type": "integer", "minimum": 1,
                                                    "maximum": 10}}}},
        "outputs": {"type": "object", "additionalProperties": False, "properties": {
            "dir": {"type": "string", "default": "."},
            "formats": {"type": "array", "uniqueItems": True,
                        "items": {"enum": ["csv", "svg", "json"]},
                        "default": ["csv", "svg", "json"]}}},
    },
}

_SECTIONS = ("series", "grid", "range", "spectrum", "vmo", "validate", "outputs")


class ConfigError(ValueError):
    pass


def _fill_defaults(cfg: dict) -> dict:
    props = CONFIG_SCHEMA["properties"]
    cfg.setdefault("p", props["p"]["default"])
    for sec in _SECTIONS:
        sub = cfg.setdefault(sec, {})
        for key, spec in props[sec]["properties"].items():
            if "default" in spec:
                sub.setdefault(key, copy.deepcopy(spec["default"]))
    return cfg


def parse_config(text: str) -> dict:
    """Validate a JSON job description and fill defaults; errors name the field path."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        # report the deepest failing branch of a oneOf
        if err.context:
            sub = max(err.context, key=lambda e: len(e.absolute_path))
            where = "/".join(str(p) for p in sub.absolute_path) or where
            msg = sub.message
        else:
            msg = err.message
        raise ConfigError(f"config error at '{where}': {msg}")
    cfg = _fill_defaults(raw)
    if "samples" not in cfg["symbol"]:
        cfg["symbol"].setdefault("terms", [])
    return cfg


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def load_symbol(cfg: dict, base: Path):
    """Return an :class:`ExpPolySymbol` or a :class:`SampledBoundarySymbol`.

    A samples file is CSV with header ``x,re,im``.
    """
    spec = cfg["symbol"]
    if "samples" in spec:
        path = (base / spec["samples"]).resolve()
        try:
            data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        except OSError as exc:
            raise ConfigError(f"config error at 'symbol/samples': {exc}") from exc
        if data.shape[1] != 3:
            raise ConfigError("config error at 'symbol/samples': expected columns x,re,im")
        x = data[:, 0]
        try:
            return SampledBoundarySymbol(x, data[:, 1] + 1j * data[:, 2], float(np.abs(x).max()))
        except ValueError as exc:
            raise ConfigError(f"config error at 'symbol/samples': {exc}") from exc
    psi = ExpPolySymbol.from_spec(spec)
    im_lower_bound(psi)
    return psi


def _require_exppoly(psi, what: str) -> ExpPolySymbol:
    if not isinstance(psi, ExpPolySymbol):
        raise ConfigError(f"config error at 'symbol': {what} needs an exp-polynomial symbol")
    return psi


class Job:
    def __init__(self, cfg: dict, text: str, base: Path, out: Path | None,
                 seed_grid: float | None):
        self.cfg = cfg
        self.base = base
        self.out = out if out is not None else (base / cfg["outputs"]["dir"])
        self.formats = set(cfg["outputs"]["formats"])
        self.seed_grid = seed_grid
        self.provenance = {"config_sha256": config_hash(text), "version": __version__}

    def path(self, name: str) -> Path:
        return self.out / name

    def report(self, subcommand: str, body: dict) -> dict:
        rep = {"subcommand": subcommand, "provenance": self.provenance,
               "conventions": {"spectral_parameter": "lambda(z, t) = exp(2 pi i z t); the set "
                               "{exp(i z t)} is the same curve with t scaled by 2 pi"}}
        rep.update(body)
        if "json" in self.formats:
            write_json(self.path(f"{subcommand}_report.json"), rep)
        return rep

    # -------------------------------------------------- subcommands

    def _range_cloud(self, psi):
        rc = self.cfg["range"]
        if isinstance(psi, ExpPolySymbol):
            samples = sample_boundary(psi, rc["X"])
        else:
            samples = psi
        return essential_range_sampled(samples, rc["epsilon"], rc["n_schedule"])

    def run_range(self) -> int:
        psi = load_symbol(self.cfg, self.base)
        eps = self.cfg["range"]["epsilon"]
        cloud = self._range_cloud(psi)
        body = {"range": {"cells": tagged(len(cloud.points), 0),
                          "epsilon": tagged(eps, 0),
                          "n_max": tagged(cloud.n_max, 0)}}
        if isinstance(psi, ExpPolySymbol):
            exact = essential_range_exppoly(psi, eps)
            body["range"]["hausdorff_to_closed_form"] = tagged(
                hausdorff_distance(cloud.points, exact.points), 2 * eps)
        if "csv" in self.formats:
            write_points_csv(self.path("range.csv"), [("range", cloud.points)])
        if "svg" in self.formats:
            svg_scatter(self.path("range.svg"), cloud.points, "local essential range at infinity")
        self.report("range", body)
        return 0

    def _grid(self, psi, plan):
        g = self.cfg["grid"]
        t_max = g["t_max"]
        if t_max == "auto":
            t_max = -math.log(1e-12) / (2 * math.pi * plan.beta)
        return grid_for_symbol(psi, self.cfg["alpha"], g["t_count"], float(t_max),
                               p=plan.p, seed_dt=self.seed_grid)

    def run_series(self) -> int:
        psi = _require_exppoly(load_symbol(self.cfg, self.base), "series")
        alpha = self.cfg["alpha"]
        plan = plan_series(psi, self.cfg["p"], alpha, self.cfg["series"]["eps_target"])
        grid = self._grid(psi, plan)
        op = assemble_series(plan, psi, grid)
        # discretisation estimate: a high-order assembly (analytic tail below
        # 1e-14) against the transform sandwich on one closed-form function
        a2 = alpha + 2.0
        f = grid.sample(lambda t: t ** (alpha + 1) * np.exp(-2 * np.pi * t))
        p = self.cfg["p"]
        oracle = pw_forward(
            lambda z: math.gamma(a2) / (-2j * np.pi * (p * z + psi(z) + 1j)) ** a2, grid)
        fine = assemble_series(plan_series(psi, p, alpha, 1e-14), psi, grid)
        disc = fourier_norm(fine @ f - oracle) / fourier_norm(f)
        body = {
            "plan": {"beta": tagged(plan.beta, 1e-12), "delta": tagged(plan.delta, 1e-12),
                     "M": tagged(plan.M, 0), "p": tagged(plan.p, 0),
                     "alpha": tagged(plan.alpha, 0)},
            "error_budget": {"analytic_tail": tagged(plan.tail, 0),
                             "discretization_estimate": tagged(disc, 1e-4)},
            "operator": {"dimension": tagged(grid.size, 0), "dt": tagged(grid.dt, 0),
                         "t_max": tagged(grid.T_max, 0),
                         "weighted_norm": tagged(op.norm(), 1e-8)},
        }
        if "csv" in self.formats:
            write_rows_csv(self.path("series_coefficients.csv"), ["n", "c_n"],
                           [(n, c) for n, c in enumerate(plan.coefficients)])
        self.report("series", body)
        return 0

    def run_spectrum(self) -> int:
        psi = load_symbol(self.cfg, self.base)
        eps = self.cfg["range"]["epsilon"]
        if isinstance(psi, ExpPolySymbol):
            cloud = essential_range_exppoly(psi, eps)
        else:
            cloud = self._range_cloud(psi)
        sc = self.cfg["spectrum"]
        t_max = sc["t_max"]
        if t_max == "auto":
            t_max = 30.0 / (2 * math.pi * float(cloud.points.imag.min()))
        spec = essential_spectrum_formula(cloud, float(t_max), sc["t_count"])
        body = {"spectrum": {"range_points": tagged(len(cloud.points), 0),
                             "t_max": tagged(spec.t_max, 0), "t_count": tagged(spec.t_count, 0),
                             "t_resolution": tagged(spec.t_resolution, 0),
                             "max_modulus": tagged(float(np.abs(spec.points).max()), 1e-12)}}
        if "csv" in self.formats:
            write_points_csv(self.path("spectrum.csv"),
                             [("curve", spec.points[:-1]), ("zero", spec.points[-1:])])
        if "svg" in self.formats:
            svg_curves(self.path("spectrum.svg"), [c for _, c in spec.parametric], markers=[0j],
                       title="essential spectrum")
        self.report("spectrum", body)
        return 0

    def run_vmo(self) -> int:
        psi = _require_exppoly(load_symbol(self.cfg, self.base), "vmo")
        vc = self.cfg["vmo"]

        def eta(w):
            # psi composed with the inverse Cayley map, on the open disk
            return psi(inverse_cayley(w))

        prof = vmo_profile(eta, vc["r_levels"], vc["theta_count"])
        body = {"vmo": {"levels": [{"r": tagged(r, 0), "mean_oscillation": tagged(v, 1e-6)}
                                   for r, v in zip(prof.r_levels, prof.values)]}}
        if "csv" in self.formats:
            write_rows_csv(self.path("vmo.csv"), ["r", "mean_oscillation"],
                           zip(prof.r_levels, prof.values))
        if "svg" in self.formats:
            svg_profile(self.path("vmo.svg"), 1 - prof.r_levels, prof.values,
                        "mean oscillation vs 1 - r (log-log)")
        self.report("vmo", body)
        return 0

    def run_validate(self) -> int:
        from .validation import run_all

        results = run_all(self.cfg["validate"].get("criteria"))
        for r in results:
            print(r.line())
        body = {"criteria": [r.to_dict() for r in results],
                "all_passed": all(r.passed for r in results)}
        for r in body["criteria"]:
            r.pop("seconds", None)  # keep reports byte-stable
        self.report("validate", body)
        return 0 if body["all_passed"] else EXIT_VALIDATE


def _thread_limit():
    n = os.environ.get("QPSPECTRA_THREADS")
    if not n:
        return nullcontext()
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        log.warning("QPSPECTRA_THREADS is set but threadpoolctl is not installed")
        return nullcontext()
    return threadpool_limits(limits=int(n))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qpspectra", description=__doc__.split("\n\n")[0])
    ap.add_argument("subcommand", choices=["spectrum", "series", "range", "vmo", "validate"])
    ap.add_argument("--config", required=True, help="JSON job description")
    ap.add_argument("--out", help="output directory (overrides outputs.dir)")
    ap.add_argument("--seed-grid", type=float, metavar="DT",
                    help="Fourier grid spacing; every shift gamma/(2 pi p) must be a multiple")
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--version", action="version", version=f"qpspectra {__version__}")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        path = Path(args.config)
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"qpspectra: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text)
        if args.seed_grid is not None and not args.seed_grid > 0:
            raise ConfigError("--seed-grid must be positive")
        job = Job(cfg, text, path.parent, Path(args.out) if args.out else None, args.seed_grid)
        with _thread_limit():
            return getattr(job, f"run_{args.subcommand}")()
    except ConfigError as exc:
        print(f"qpspectra: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleSymbolError as exc:
        print(f"qpspectra: infeasible symbol: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except IncommensurableGridError as exc:
        print(f"qpspectra: grid error: {exc}", file=sys.stderr)
        return EXIT_GRID


if __name__ == "__main__":
    sys.exit(main())
