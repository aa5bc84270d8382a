"""The acceptance suite: ten numerical checks with pinned tolerances.

Each ``criterion_*`` function returns a :class:`CriterionResult`; the CLI
``validate`` subcommand and ``tests/test_acceptance.py`` both call them.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .approximation import assemble_series, plan_series, series_terms, tail_bound
from .numerics import operator_norm
from .operators import grid_for_symbol, kernel_derivative_integral, multiplier_op, phi_n_symbol
from .spaces import (HalfPlaneGrid, fourier_norm, halfplane_norm, halfplane_quadrature,
                     inverse_cayley, periodic_bergman_norm, pw_inverse)
from .spectra import (essential_normality_diag, essential_spectrum_formula, finite_section_eigs,
                      hausdorff_distance, residual_check, smallest_residual, vmo_profile)
from .symbols import (ExpPolySymbol, RangeCloud, essential_range_sampled, pullback_range_disk,
                      sample_boundary, sample_disk_boundary)

__all__ = ["CriterionResult", "CRITERIA", "run_all"]

# test symbol used by several criteria: 2i + 0.5 exp(iz)
TEST_SYMBOL = ExpPolySymbol(2j, ((0.5, 1.0),))


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"[{flag}] criterion {self.number:2d} {self.name}: "
                f"value={self.value:.4g} tolerance={self.tolerance:.4g} ({self.seconds:.1f}s)")

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": bool(self.passed),
                "value": {"value": _finite(self.value), "tolerance": self.tolerance},
                "detail": self.detail, "seconds": round(self.seconds, 1)}


def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _closed_form_pair(alpha: float, b: float = 1.0, shift: float = 0.0):
    """``f(t) = t^(a+1) e^{-2 pi b t} e^{2 pi i shift t}`` and its transform
    ``Gamma(a+2) / (-2 pi i (z + shift + i b))^(a+2)``."""
    def f(t):
        return t ** (alpha + 1.0) * np.exp(-2.0 * np.pi * b * t) * np.exp(2j * np.pi * shift * t)

    def F(z):
        return math.gamma(alpha + 2.0) / (-2j * np.pi * (z + shift + 1j * b)) ** (alpha + 2.0)

    return f, F


@_timed
def criterion_1() -> CriterionResult:
    """Paley-Wiener isometry on a 400-node grid."""
    worst = 0.0
    detail = {}
    for alpha in (0.0, 0.5, 1.0):
        f, F = _closed_form_pair(alpha)
        grid = HalfPlaneGrid.uniform(alpha, 400, t_max=1.5)
        fg = grid.sample(f)
        fn = fourier_norm(fg)
        discrete = abs(periodic_bergman_norm(fg) - fn) / fn
        exact = math.sqrt(math.gamma(alpha + 1) / 2 ** (alpha + 1)
                          * math.gamma(alpha + 2) / (4 * math.pi) ** (alpha + 2))
        continuous = abs(halfplane_norm(F, alpha, measure="fourier") - exact) / exact
        detail[f"alpha={alpha}"] = {"discrete_pair": discrete, "closed_form": continuous}
        worst = max(worst, discrete, continuous)
    detail["alpha=0 closed norm^2"] = 1.0 / (32 * math.pi ** 2)
    return CriterionResult(1, "Paley-Wiener isometry", worst <= 1e-4, worst, 1e-4, detail)


@_timed
def criterion_2() -> CriterionResult:
    """Integral operator M_n against the multiplier phi_n, n = 0..5."""
    zs = np.array([0.3 + 0.5j, -1.0 + 1.0j, 0.8 + 0.7j])
    beta = 2.0
    worst = 0.0
    detail = {}
    for alpha in (0.0, 1.0):
        grid = HalfPlaneGrid.uniform(alpha, 4000, t_max=2.0)
        rule = halfplane_quadrature(alpha, 128, 256)
        pairs = [_closed_form_pair(alpha, 1.0), _closed_form_pair(alpha, 2.0),
                 _closed_form_pair(alpha, 1.0, 0.5)]
        for n in range(6):
            err = 0.0
            for f, F in pairs:
                fg = grid.sample(f)
                lhs = pw_inverse(multiplier_op(phi_n_symbol(n, beta, alpha), grid) @ fg, zs)
                rhs = kernel_derivative_integral(F, n, beta, alpha, zs, rule)
                err = max(err, float(np.max(np.abs(lhs - rhs) / np.abs(lhs))))
            detail[f"alpha={alpha},n={n}"] = err
            worst = max(worst, err)
    return CriterionResult(2, "integral operator equals multiplier", worst <= 1e-4, worst, 1e-4,
                           detail)


def series_residuals(N: int = 800, t_max: float = 8.5, window: int = 15, M_max: int = 20):
    """``residual(M)``: weighted norm of terms ``M+1 .. M+window`` for the test symbol."""
    psi = TEST_SYMBOL
    plan = plan_series(psi, 1.0, 0.0, 1e-6)
    grid = grid_for_symbol(psi, 0.0, N, t_max)
    terms = [t for _, t in series_terms(plan, psi, grid, n_stop=M_max + window)]
    w = grid.ip_weights
    res = []
    for M in range(1, M_max + 1):
        block = np.sum(terms[M + 1:M + 1 + window], axis=0)
        res.append(operator_norm(block, w))
    return plan, np.array(res)


@_timed
def criterion_3() -> CriterionResult:
    """Series remainder against the certified tail and the geometric rate."""
    plan, res = series_residuals()
    Ms = np.arange(1, 21)
    tails = np.array([tail_bound(int(M), plan.delta, 0.0) for M in Ms])
    bound_ok = bool(np.all(res <= tails))
    ratios = res[3:16] / res[2:15]  # M = 3..15
    worst_ratio = float(ratios.max())
    passed = bound_ok and worst_ratio <= 0.30
    detail = {"beta": plan.beta, "delta": plan.delta,
              "residual_over_tail_max": float(np.max(res / tails)),
              "rate_max": worst_ratio}
    return CriterionResult(3, "series convergence", passed, worst_ratio, 0.30, detail)


@_timed
def criterion_4() -> CriterionResult:
    """Constant symbols: exact diagonal, eigenvalues on the formula set."""
    detail = {}
    psi = ExpPolySymbol(1j)
    plan = plan_series(psi, 1.0, 0.0, 1e-8)
    t_max = -math.log(1e-12) / (2 * math.pi * plan.beta)
    grid = HalfPlaneGrid.uniform(0.0, 800, t_max=t_max)
    A = assemble_series(plan, psi, grid)
    off = float(np.abs(A.matrix - np.diag(np.diag(A.matrix))).max())
    eigs = finite_section_eigs(A)
    formula = essential_spectrum_formula(RangeCloud(np.array([1j]), 0.0, math.inf),
                                         30.0 / (2 * math.pi), 4001)
    # image resolution: largest gap between consecutive eigenvalues on [0, 1]
    srt = np.sort(np.concatenate([eigs.real, [0.0, 1.0]]))
    resolution = float(np.max(np.diff(srt)))
    hd = hausdorff_distance(eigs, formula.points)
    detail.update(off_diagonal=off, hausdorff=hd, image_resolution=resolution)
    ok_i = off == 0.0 and hd <= 2 * resolution

    psi2 = ExpPolySymbol(1 + 1j)
    plan2 = plan_series(psi2, 1.0, 0.0, 1e-15)
    grid2 = HalfPlaneGrid.uniform(0.0, 400, t_max=-math.log(1e-12) / (2 * math.pi))
    A2 = assemble_series(plan2, psi2, grid2)
    off2 = float(np.abs(A2.matrix - np.diag(np.diag(A2.matrix))).max())
    lam = np.diag(A2.matrix)
    # spiral exp(2 pi i (1+i) t): |lambda| = exp(-arg) with arg unwrapped along t
    arg = np.unwrap(np.angle(lam))
    spiral = float(np.max(np.abs(np.abs(lam) - np.exp(-arg))))
    eig2 = finite_section_eigs(A2)
    match = hausdorff_distance(eig2, lam)
    detail.update(spiral_deviation=spiral, spiral_off_diagonal=off2, spiral_eig_match=match,
                  spiral_M=plan2.M)
    ok_s = off2 == 0.0 and spiral <= 1e-8 and match <= 1e-8
    value = max(spiral, match)
    return CriterionResult(4, "constant symbol spectra", ok_i and ok_s, value, 1e-8, detail)


def residual_table(N: int = 800, t_max: float = 2.2, n_z: int = 12, n_t: int = 10):
    """Best Gaussian-probe residuals for the test symbol.

    ``t0`` values put the centre modulus ``exp(-4 pi t0)`` on a geometric
    sequence from 0.5 to 0.005. For each ``(z, t0)`` the probe width ranges
    over a geometric set in ``[3 dt, t0 / 4]`` and the position is optimised.
    Returns ``(t0s, zs, residuals, lower_bounds)``; ``lower_bounds`` is the
    smallest weighted singular value of ``A - lambda``, a floor for any probe.
    """
    psi = TEST_SYMBOL
    plan = plan_series(psi, 1.0, 0.0, 1e-12)
    grid = grid_for_symbol(psi, 0.0, N, t_max)
    A = assemble_series(plan, psi, grid)
    t0s = np.log(1.0 / np.geomspace(0.5, 0.005, n_t)) / (4 * math.pi)
    zs = 2j + 0.5 * np.exp(2j * math.pi * np.arange(n_z) / n_z)
    res = np.empty((n_t, n_z))
    low = np.empty((n_t, n_z))
    for i, t0 in enumerate(t0s):
        w_lo, w_hi = 3 * grid.dt, t0 / 4
        widths = np.geomspace(w_lo, w_hi, 4) if w_hi > w_lo else [w_lo]
        for j, z in enumerate(zs):
            best = math.inf
            for w in widths:
                try:
                    best = min(best, residual_check(A, z, t0, w, scan=128))
                except ValueError:
                    continue
            res[i, j] = best
            low[i, j] = smallest_residual(A, np.exp(2j * np.pi * z * t0))
    return t0s, zs, res, low


@_timed
def criterion_5() -> CriterionResult:
    """Approximate eigenvalues along the formula set."""
    t0s, zs, res, low = residual_table()
    worst = float(res.max())
    detail = {"t0": t0s.tolist(), "max_residual_per_t0": res.max(axis=1).tolist(),
              "probe_floor_per_t0": low.max(axis=1).tolist(),
              "pairs_over_tolerance": int(np.sum(res > 0.05)),
              "pairs_with_floor_over_tolerance": int(np.sum(low > 0.05))}
    return CriterionResult(5, "residual certificate", worst <= 0.05, worst, 0.05, detail)


@_timed
def criterion_6() -> CriterionResult:
    """Self-commutator decay separates essentially normal from shift."""
    psi = TEST_SYMBOL
    grid = grid_for_symbol(psi, 0.0, 800, 8.5)
    A = assemble_series(plan_series(psi, 1.0, 0.0, 1e-12), psi, grid)
    quasi = essential_normality_diag(A).ratio
    const = ExpPolySymbol(2j)
    C = assemble_series(plan_series(const, 1.0, 0.0, 1e-12), const, grid)
    zero = essential_normality_diag(C).ratio
    shift = essential_normality_diag(np.eye(800, k=-1)).ratio
    passed = quasi >= 10 and zero == 0.0 and 0.5 <= shift <= 2.0
    detail = {"quasi_parabolic": _finite(quasi), "constant": zero, "shift_control": shift}
    return CriterionResult(6, "essential normality", passed, min(quasi, 1e300), 10.0, detail)


def _circle(center, radius, n=20000):
    return center + radius * np.exp(2j * np.pi * np.arange(n) / n)


SCHEDULE = (10.0, 100.0, 1000.0, 4000.0)


@_timed
def criterion_7() -> CriterionResult:
    """Occupancy range estimator on a periodic and a continuous symbol."""
    eps = 0.02
    samp = sample_boundary(lambda x: 2j + 0.5 * np.exp(1j * x), 1e4)
    cloud = essential_range_sampled(samp, eps, SCHEDULE)
    hd = hausdorff_distance(cloud.points, _circle(2j, 0.5))
    cont = sample_boundary(lambda x: 2j + 1.0 / (x + 1j), 1e4)
    cloud2 = essential_range_sampled(cont, eps, SCHEDULE)
    dist = float(np.abs(cloud2.points - 2j).max())
    passed = hd <= 0.04 and dist <= eps
    detail = {"circle_hausdorff": hd, "limit_point_distance": dist, "cells": len(cloud.points)}
    return CriterionResult(7, "essential range estimator", passed, hd, 0.04, detail)


@_timed
def criterion_8() -> CriterionResult:
    """Disk-side and half-plane ranges and spectra agree."""
    eps = 0.02

    def psi_star(x):
        return 2j + 0.5 * np.exp(1j * x)

    half = essential_range_sampled(sample_boundary(psi_star, 1e4), eps, SCHEDULE)
    theta, vals = sample_disk_boundary(lambda w: psi_star(inverse_cayley(w).real), 1e4)
    disk = pullback_range_disk(theta, vals, eps, SCHEDULE)
    a, b = half.cells, disk.cells

    def near(c, cells):
        return any((c[0] + di, c[1] + dj) in cells for di in (-1, 0, 1) for dj in (-1, 0, 1))

    cells_ok = all(near(c, b) for c in a) and all(near(c, a) for c in b)
    t_max = 30.0 / (2 * math.pi * 1.5)
    t_count = 2000
    s_half = essential_spectrum_formula(half, t_max, t_count)
    s_disk = essential_spectrum_formula(disk, t_max, t_count)
    hd = hausdorff_distance(s_half.points, s_disk.points)
    # |d/dz exp(2 pi i z t)| = 2 pi t exp(-2 pi t Im z) <= 1 / (e Im z) < 1 here,
    # so a one-cell offset in z moves a curve point by less than eps sqrt 2
    tol = eps * math.sqrt(2) + s_half.t_resolution
    passed = cells_ok and hd <= tol
    detail = {"cells_half": len(a), "cells_disk": len(b), "symmetric_difference": len(a ^ b),
              "spectrum_hausdorff": hd}
    return CriterionResult(8, "disk/half-plane consistency", passed, hd, tol, detail)


@_timed
def criterion_9() -> CriterionResult:
    """Closed-form tail against direct summation."""
    worst = 0.0
    for M in range(51):
        for d in np.linspace(0.01, 0.9, 90):
            c = tail_bound(M, float(d), 0.0, method="closed")
            s = tail_bound(M, float(d), 0.0, method="sum")
            worst = max(worst, abs(c - s) / c)
    example = tail_bound(10, 0.25, 0.0)
    passed = worst <= 1e-12 and abs(example - 3.92e-6) <= 0.005e-6
    return CriterionResult(9, "tail bound", passed, worst, 1e-12, {"example_M10_d025": example})


@_timed
def criterion_10() -> CriterionResult:
    """Mean-oscillation profile of a smooth and a radially oscillating function."""
    smooth = vmo_profile(lambda z: z, [0.999]).values[0]
    levels = np.geomspace(0.01, 0.0001, 9)
    wild = vmo_profile(lambda z: np.exp(1j / (1 - np.abs(z))), 1 - levels).values
    passed = smooth < 0.01 and float(wild.min()) > 0.1
    detail = {"z_at_0.999": float(smooth), "oscillating_min": float(wild.min())}
    return CriterionResult(10, "VMO diagnostic", passed, smooth, 0.01, detail)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}


def run_all(numbers=None) -> list[CriterionResult]:
    return [CRITERIA[k]() for k in (numbers or sorted(CRITERIA))]
