"""Finite matrix representations of multipliers, translations, dilations and
analytic Toeplitz operators on the Fourier-side grid, and of composition and
Toeplitz operators on the monomial basis of ``A^2_alpha(D)``.

Fourier-side matrices act on :class:`~qpspectra.spaces.GridFunction` value
vectors. The weighted inner product lives in the grid; adjoints go through
:func:`weighted_adjoint`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .numerics import Poly, QuadratureRule, as_complex_matrix, operator_norm
from .spaces import (GridFunction, HalfPlaneGrid, gamma_ratio, halfplane_quadrature,
                     reproducing_constant)
from .symbols import ExpPolySymbol, common_frequency

__all__ = [
    "IncommensurableGridError",
    "FourierOperator",
    "DiskOperator",
    "onb_norm",
    "multiplier_op",
    "phi_n_symbol",
    "shift_op",
    "toeplitz_exppoly",
    "dilation_op",
    "grid_for_symbol",
    "kernel_derivative_integral",
    "composition_disk",
    "toeplitz_disk",
    "weighted_adjoint",
]

SHIFT_REL_TOL = 1e-12
MAX_DISK_DEGREE = 512


class IncommensurableGridError(ValueError):
    """A shift is not an integer multiple of the grid spacing."""


@dataclass(frozen=True, eq=False)
class FourierOperator:
    grid: HalfPlaneGrid
    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if m.shape != (self.grid.size, self.grid.size):
            raise ValueError(f"matrix shape {m.shape} does not match grid size {self.grid.size}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other):
        if isinstance(other, FourierOperator):
            return FourierOperator(self.grid, self.matrix @ other.matrix)
        if isinstance(other, GridFunction):
            return GridFunction(self.grid, self.matrix @ other.values)
        return NotImplemented

    def __add__(self, other: "FourierOperator") -> "FourierOperator":
        return FourierOperator(self.grid, self.matrix + other.matrix)

    def __sub__(self, other: "FourierOperator") -> "FourierOperator":
        return FourierOperator(self.grid, self.matrix - other.matrix)

    def __rmul__(self, c) -> "FourierOperator":
        return FourierOperator(self.grid, c * self.matrix)

    def norm(self) -> float:
        """Operator norm in the weighted inner product of the grid."""
        return operator_norm(self.matrix, self.grid.ip_weights)

    @classmethod
    def identity(cls, grid: HalfPlaneGrid) -> "FourierOperator":
        return cls(grid, np.eye(grid.size, dtype=complex))


@dataclass(frozen=True, eq=False)
class DiskOperator:
    alpha: float
    degree: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if m.shape != (self.degree + 1, self.degree + 1):
            raise ValueError(f"matrix shape {m.shape} does not match degree {self.degree}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: "DiskOperator") -> "DiskOperator":
        return DiskOperator(self.alpha, self.degree, self.matrix @ other.matrix)


def onb_norm(n, alpha: float):
    """``||z^n||`` in ``A^2_alpha(D)``: ``sqrt(pi n! Gamma(a+1) / Gamma(n+a+2))``."""
    n = np.asarray(n, dtype=float)
    val = np.sqrt(np.pi * np.exp(special.gammaln(n + 1.0) + special.gammaln(alpha + 1.0)
                                 - special.gammaln(n + alpha + 2.0)))
    return float(val) if val.ndim == 0 else val


# ------------------------------------------------------- Fourier side


def multiplier_op(theta, grid: HalfPlaneGrid) -> FourierOperator:
    """``D_theta`` as ``diag(theta(t_j))``."""
    vals = np.asarray(theta(grid.t_nodes), dtype=complex) * np.ones(grid.size)
    return FourierOperator(grid, np.diag(vals))


def phi_n_symbol(n: int, beta: float, alpha: float):
    """``t -> (2 pi i t)^n exp(-2 pi beta t) / ((a+2)(a+3)...(a+n+1))``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if not beta > 0:
        raise ValueError("beta must be positive")
    denom = gamma_ratio(n, alpha)

    def phi(t):
        t = np.asarray(t, dtype=float)
        return (2j * np.pi * t) ** n * np.exp(-2.0 * np.pi * beta * t) / denom

    return phi


def _shift_steps(t0: float, grid: HalfPlaneGrid) -> int:
    if t0 < 0:
        raise ValueError("shift must be non-negative")
    k = int(round(t0 / grid.dt))
    if abs(t0 - k * grid.dt) > SHIFT_REL_TOL * max(t0, grid.dt):
        raise IncommensurableGridError(
            f"shift {t0!r} is not a multiple of the grid spacing {grid.dt!r}")
    return k


def shift_op(t0: float, grid: HalfPlaneGrid) -> FourierOperator:
    """``f(t) -> f(t - t0)`` for ``t >= t0``, zero below; Fourier image of
    multiplication by ``exp(2 pi i t0 z)``."""
    k = _shift_steps(t0, grid)
    return FourierOperator(grid, np.eye(grid.size, k=-k, dtype=complex))


def toeplitz_exppoly(c0: complex, terms, grid: HalfPlaneGrid) -> FourierOperator:
    """Fourier image of multiplication by ``c0 + sum c_k exp(i gamma_k z)``."""
    m = complex(c0) * np.eye(grid.size, dtype=complex)
    for c, g in terms:
        k = _shift_steps(g / (2.0 * np.pi), grid)
        m += complex(c) * np.eye(grid.size, k=-k)
    return FourierOperator(grid, m)


def dilation_op(p: float, grid: HalfPlaneGrid) -> FourierOperator:
    """Fourier image of ``V_p g(z) = g(p z)``: ``f(s) -> f(s / p) / p``.

    Approximate for ``p != 1``: cubic-spline interpolation through the grid
    samples (extrapolated below the first node, zero beyond ``T_max``).
    """
    if not p > 0:
        raise ValueError("dilation parameter must be positive")
    if p == 1:
        return FourierOperator.identity(grid)
    t = grid.t_nodes
    s = t / p
    spline = CubicSpline(t, np.eye(grid.size), axis=0, extrapolate=True)
    m = spline(s) / p
    m[s > grid.T_max] = 0.0
    return FourierOperator(grid, m.astype(complex))


def grid_for_symbol(psi: ExpPolySymbol, alpha: float, n: int, t_max: float, *,
                    p: float = 1.0, seed_dt: float | None = None) -> HalfPlaneGrid:
    """Uniform Fourier grid on which every shift ``gamma_k / (2 pi p)`` of
    ``psi(z / p)`` is a whole number of steps.

    Without ``seed_dt`` the spacing is ``d / q`` where ``d`` is the common
    divisor of the shifts and ``q`` the smallest integer with
    ``n d / q <= t_max``.
    """
    shifts = psi.gammas / (2.0 * np.pi * p)
    if seed_dt is not None:
        grid = HalfPlaneGrid.uniform(alpha, n, dt=float(seed_dt))
        for s in shifts:
            _shift_steps(float(s), grid)
        return grid
    if shifts.size == 0:
        return HalfPlaneGrid.uniform(alpha, n, t_max=t_max)
    d = common_frequency(shifts)
    if d is None:
        raise IncommensurableGridError(
            "frequencies are not rationally dependent; supply a seed spacing that "
            f"approximates a common divisor of {shifts.tolist()}")
    q = max(1, math.ceil(d * n / t_max - 1e-9))
    grid = HalfPlaneGrid.uniform(alpha, n, dt=d / q)
    for s in shifts:
        _shift_steps(float(s), grid)
    return grid


def kernel_derivative_integral(g, n: int, beta: float, alpha: float, z,
                               rule: QuadratureRule | None = None):
    """``c_alpha * int_H g(w) dA_alpha(w) / (conj(w) - z - i beta)^(n+alpha+2)``.

    Differentiating the reproducing formula ``n`` times shows this equals
    ``g^(n)(z + i beta) / ((a+2)...(a+n+1))``, the multiplier
    ``phi_n_symbol(n, beta, alpha)`` on the Fourier side.
    """
    if rule is None:
        rule = halfplane_quadrature(alpha)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    vals = rule.weights * np.asarray(g(rule.nodes), dtype=complex)
    w_bar = np.conj(rule.nodes)
    out = np.array([np.sum(vals * (w_bar - zz - 1j * beta) ** (-(n + alpha + 2.0))) for zz in z])
    return reproducing_constant(alpha) * out


# ------------------------------------------------------- disk side


def _boundary_max(phi: Poly, n: int = 4096) -> float:
    w = np.exp(2j * np.pi * np.arange(n) / n)
    return float(np.max(np.abs(phi(w))))


def composition_disk(phi: Poly, alpha: float, N: int) -> DiskOperator:
    """Finite section of ``C_phi`` on ``e_n = z^n / ||z^n||``, ``n <= N``.

    Column ``n`` holds the coefficients of ``phi^n`` up to degree ``N``,
    rescaled by ``||z^m|| / ||z^n||``.
    """
    if N > MAX_DISK_DEGREE:
        raise ValueError(f"degree {N} exceeds {MAX_DISK_DEGREE}")
    bmax = _boundary_max(phi)
    if bmax > 1.0 + 1e-9:
        raise ValueError(f"phi is not a self-map of the disk (boundary max {bmax:.6g})")
    pc = np.zeros(N + 1, dtype=complex)
    c = phi.coefficients[: N + 1]
    pc[: c.size] = c
    norms = onb_norm(np.arange(N + 1), alpha)
    m = np.zeros((N + 1, N + 1), dtype=complex)
    power = np.zeros(N + 1, dtype=complex)
    power[0] = 1.0
    for k in range(N + 1):
        m[:, k] = power
        power = np.convolve(power, pc)[: N + 1]
    m *= norms[:, None] / norms[None, :]
    return DiskOperator(float(alpha), N, m)


def toeplitz_disk(analytic, conjugate, alpha: float, N: int) -> DiskOperator:
    """``T_f`` for ``f = sum a_j z^j + sum b_j conj(z)^j`` on ``e_0..e_N``.

    ``z^j e_n = (||z^(n+j)|| / ||z^n||) e_(n+j)`` and
    ``P(conj(z)^j e_n) = (||z^n|| / ||z^(n-j)||) e_(n-j)`` for ``n >= j``.
    """
    a = np.asarray(analytic, dtype=complex)
    b = np.asarray(conjugate, dtype=complex)
    norms = onb_norm(np.arange(N + 1 + max(a.size, 1)), alpha)
    m = np.zeros((N + 1, N + 1), dtype=complex)
    idx = np.arange(N + 1)
    for j, aj in enumerate(a):
        if aj == 0 or j > N:
            continue
        cols = idx[: N + 1 - j]
        m[cols + j, cols] += aj * norms[cols + j] / norms[cols]
    for j, bj in enumerate(b):
        if bj == 0 or j > N:
            continue
        cols = idx[j:]
        m[cols - j, cols] += bj * norms[cols] / norms[cols - j]
    return DiskOperator(float(alpha), N, m)


def weighted_adjoint(A: FourierOperator) -> FourierOperator:
    """``W^-1 A^H W`` with ``W`` the grid's inner-product weights."""
    w = A.grid.ip_weights
    return FourierOperator(A.grid, (A.matrix.conj().T * w[None, :]) / w[:, None])
