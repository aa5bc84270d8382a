"""Weighted Bergman spaces on the disk and upper half-plane and the
Fourier-side space ``L^2_{alpha+1}(R^+)``.

Two normalisations of the half-plane area measure appear:

* ``"standard"``: ``dA_alpha = y^alpha dx dy``. The Cayley map ``phi_map``
  is an isometry from ``A^2_alpha(D)`` (measure ``(1-|w|^2)^alpha dA``) for
  this measure.
* ``"fourier"``: ``(2 pi)^(alpha+1) y^alpha dx dy``. With the Fourier-side
  norm ``Gamma(alpha+1) / 2^(alpha+1) * int |f|^2 t^-(alpha+1) dt`` the pair
  ``pw_inverse`` / ``pw_forward`` is unitary only for this measure.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .numerics import Poly, QuadratureRule, disk_quadrature

__all__ = [
    "SpaceParams",
    "HalfPlaneGrid",
    "GridFunction",
    "QuadratureTruncationWarning",
    "fourier_measure_scale",
    "fourier_norm",
    "fourier_inner",
    "pw_inverse",
    "pw_forward",
    "cayley",
    "inverse_cayley",
    "phi_map",
    "kernel_eval",
    "halfplane_quadrature",
    "halfplane_norm",
    "periodic_bergman_norm",
    "reproducing_constant",
    "reproducing_constant_closed_form",
    "reproduce",
]


class QuadratureTruncationWarning(UserWarning):
    """The integrand carries noticeable mass outside the truncated domain."""


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > -1:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    return alpha


@dataclass(frozen=True)
class SpaceParams:
    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)


@dataclass(frozen=True, eq=False)
class HalfPlaneGrid:
    """Uniform grid ``t_j = j * dt`` (``j = 1..N``) on ``(0, T_max]``.

    ``t = 0`` is excluded; trapezoid weights treat the integrand as vanishing
    there, so the first node carries a full ``dt`` and the last ``dt / 2``.
    """

    alpha: float
    t_nodes: np.ndarray
    t_weights: np.ndarray
    T_max: float
    dt: float

    @classmethod
    def uniform(cls, alpha: float, n: int, *, t_max: float | None = None,
                dt: float | None = None) -> "HalfPlaneGrid":
        alpha = _check_alpha(alpha)
        if n < 2:
            raise ValueError("grid needs at least two nodes")
        if (t_max is None) == (dt is None):
            raise ValueError("give exactly one of t_max or dt")
        if dt is None:
            dt = float(t_max) / n
        if not dt > 0:
            raise ValueError("grid spacing must be positive")
        t = dt * np.arange(1, n + 1)
        w = np.full(n, dt)
        w[-1] = 0.5 * dt
        t.flags.writeable = False
        w.flags.writeable = False
        return cls(alpha, t, w, float(t[-1]), float(dt))

    @property
    def size(self) -> int:
        return self.t_nodes.size

    @property
    def norm_constant(self) -> float:
        b = self.alpha + 1.0
        return math.gamma(b) / 2.0 ** b

    @property
    def ip_weights(self) -> np.ndarray:
        """Diagonal of the Gram matrix of the Fourier-side inner product."""
        return self.norm_constant * self.t_weights * self.t_nodes ** (-(self.alpha + 1.0))

    def sample(self, func) -> "GridFunction":
        return GridFunction(self, np.asarray(func(self.t_nodes), dtype=complex))


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: HalfPlaneGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function has non-finite values")
        object.__setattr__(self, "values", v)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.values - other.values)

    def __rmul__(self, c) -> "GridFunction":
        return GridFunction(self.grid, c * self.values)


def fourier_measure_scale(alpha: float) -> float:
    """Factor turning ``y^alpha dx dy`` into the measure that makes the
    Paley-Wiener pair unitary."""
    return (2.0 * math.pi) ** (alpha + 1.0)


def fourier_inner(f: GridFunction, g: GridFunction) -> complex:
    return complex(np.sum(f.grid.ip_weights * f.values * np.conj(g.values)))


def fourier_norm(f: GridFunction) -> float:
    """``sqrt(Gamma(a+1)/2^(a+1) * sum w_j |f_j|^2 t_j^-(a+1))``."""
    return math.sqrt(max(fourier_inner(f, f).real, 0.0))


# ------------------------------------------------------- Paley-Wiener pair


def pw_inverse(f: GridFunction, z):
    """Trapezoid approximation of ``int_0^inf f(t) exp(2 pi i t z) dt``.

    ``z`` may be a scalar or an array of points with positive imaginary part.
    On the uniform grid the sum is a polynomial in ``exp(2 pi i dt z)``,
    evaluated by Horner's rule (stable since that base has modulus < 1).
    """
    z_arr = np.asarray(z, dtype=complex)
    if np.any(z_arr.imag <= 0):
        raise ValueError("pw_inverse needs Im z > 0")
    g = f.grid
    coef = np.concatenate([[0.0], g.t_weights * f.values])
    base = np.exp(2j * np.pi * g.dt * z_arr)
    out = np.polynomial.polynomial.polyval(base, coef)
    return complex(out) if np.ndim(out) == 0 else out


def _log_y_levels(alpha: float, t_min: float, t_max: float, step: float):
    # trapezoid in s = log y for int_0^inf y^alpha h(y) dy; integrand in s is
    # y^(alpha+1) h(y), decaying like exp((alpha+1) s) on the left and like
    # exp(-4 pi t_min e^s) on the right
    s_lo = -30.0 / (alpha + 1.0)
    s_hi = math.log(45.0 / (4.0 * math.pi * t_min))
    s = np.arange(s_lo, s_hi + step, step)
    y = np.exp(s)
    return y, step * y ** (alpha + 1.0)


def pw_forward(g, grid: HalfPlaneGrid, *, x_extent: float = 8000.0,
               oversample: float = 2.0, log_step: float = 0.15,
               tail_tol: float = 1e-2, periodic: bool = False) -> GridFunction:
    """Grid samples of
    ``2^(a+1) t^(a+1) / Gamma(a+1) * int_H exp(-2 pi i t conj(z)) g(z) dA_a(z)``
    with the Fourier-normalised measure.

    The x-integral at each height is a periodic trapezoid rule evaluated by
    FFT on a window whose length is a multiple of ``1/dt``, so every grid
    node is an exact FFT frequency. The y-integral is a trapezoid rule in
    ``log y``.

    Parameters
    ----------
    g
        Vectorised callable, analytic on the upper half-plane.
    x_extent
        Minimal length of the x-window; the actual length is ``q / dt``.
    oversample
        Ratio of the x sampling rate to the Nyquist rate of the grid.
    periodic
        Integrate ``x`` over exactly one period ``1/dt``. Use this for
        functions produced by :func:`pw_inverse`, which are ``1/dt``-periodic
        in ``x``; on that window the discrete pair inverts exactly, up to
        the half weight of the last node.
    """
    alpha = grid.alpha
    dt = grid.dt
    n = grid.size
    q = 1 if periodic else max(1, math.ceil(x_extent * dt))
    length = q / dt
    n_x = 1 << math.ceil(math.log2(oversample * 2.0 * n * q))
    dx = length / n_x
    m = np.arange(n_x)
    x = np.where(m < n_x // 2, m, m - n_x) * dx
    y_levels, y_weights = _log_y_levels(alpha, grid.t_nodes[0], grid.T_max, log_step)
    idx = q * np.arange(1, n + 1)
    t = grid.t_nodes
    acc = np.zeros(n, dtype=complex)
    edge = 0.0
    mass = 0.0
    for y, wy in zip(y_levels, y_weights):
        vals = np.asarray(g(x + 1j * y), dtype=complex)
        absvals = np.abs(vals)
        # mass beyond the window estimated as edge value times window length
        damp = wy * math.exp(-2.0 * math.pi * t[0] * y)
        mass += damp * float(absvals.sum()) * dx
        edge += damp * float(absvals[n_x // 2 - 1:n_x // 2 + 1].max()) * length
        spec = np.fft.fft(vals)[idx] * dx
        # conj(z) = x - i y: exp(-2 pi i t conj z) = exp(-2 pi i t x) exp(-2 pi t y)
        acc += wy * np.exp(-2.0 * np.pi * t * y) * spec
    if not periodic and mass > 0 and edge > tail_tol * mass:
        warnings.warn(
            f"pw_forward: estimated mass outside the x-window is {edge / mass:.1e} of the total",
            QuadratureTruncationWarning, stacklevel=2)
    scale = fourier_measure_scale(alpha) * 2.0 ** (alpha + 1.0) / math.gamma(alpha + 1.0)
    return GridFunction(grid, scale * t ** (alpha + 1.0) * acc)


# ------------------------------------------------------- Cayley and Phi


def cayley(z):
    """``(z - i) / (z + i)``, mapping the upper half-plane onto the disk."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == -1j):
        raise ZeroDivisionError("cayley has a pole at z = -i")
    w = (z - 1j) / (z + 1j)
    return complex(w) if w.ndim == 0 else w


def inverse_cayley(w):
    """``i (1 + w) / (1 - w)``."""
    w = np.asarray(w, dtype=complex)
    if np.any(w == 1):
        raise ZeroDivisionError("inverse_cayley has a pole at w = 1")
    z = 1j * (1 + w) / (1 - w)
    return complex(z) if z.ndim == 0 else z


def phi_map(f, alpha: float, z):
    """``Phi(f)(z) = 2^(a+1) / (z + i)^(a+2) * f(cayley(z))``."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("phi_map needs Im z > 0")
    val = 2.0 ** (alpha + 1.0) / (z + 1j) ** (alpha + 2.0) * f(cayley(z))
    return complex(val) if np.ndim(val) == 0 else val


def kernel_eval(w, z, alpha: float):
    """``k_w(z) = 1 / (conj(w) - z)^(alpha + 2)`` on the principal branch."""
    val = 1.0 / (np.conj(np.asarray(w, dtype=complex)) - np.asarray(z, dtype=complex)) ** (alpha + 2.0)
    return complex(val) if np.ndim(val) == 0 else val


# ------------------------------------------------------- half-plane quadrature


def halfplane_quadrature(alpha: float, n_r: int = 96, n_theta: int = 192) -> QuadratureRule:
    """``y^alpha dx dy`` on the upper half-plane, as the image of
    :func:`~qpspectra.numerics.disk_quadrature` under ``inverse_cayley``.

    With ``w = cayley(z)``: ``y = (1-|w|^2) / |1-w|^2`` and
    ``|dz/dw|^2 = 4 / |1-w|^4``.
    """
    alpha = _check_alpha(alpha)
    disk = disk_quadrature(alpha, n_r, n_theta)
    w = disk.nodes
    z = inverse_cayley(w)
    jac = 4.0 * np.abs(1.0 - w) ** (-2.0 * alpha - 4.0)
    return QuadratureRule(z, disk.weights * jac, "halfplane_truncated", alpha)


def halfplane_norm(func, alpha: float, rule: QuadratureRule | None = None,
                   measure: str = "standard") -> float:
    """A^2_alpha(H) norm of ``func`` by half-plane quadrature."""
    if rule is None:
        rule = halfplane_quadrature(alpha)
    vals = np.asarray(func(rule.nodes))
    n2 = float(np.sum(rule.weights * np.abs(vals) ** 2))
    if measure == "fourier":
        n2 *= fourier_measure_scale(alpha)
    elif measure != "standard":
        raise ValueError(f"unknown measure {measure!r}")
    return math.sqrt(n2)


def periodic_bergman_norm(f: GridFunction, *, n_x: int | None = None,
                          log_step: float = 0.05) -> float:
    """Fourier-normalised A^2_alpha norm of ``pw_inverse(f)`` over one period.

    The trapezoid sum defining ``pw_inverse(f)`` is periodic in ``x`` with
    period ``1/dt``; the quadrature runs over one period in ``x`` (uniform
    rule, evaluated by FFT) and over ``y`` in ``log y``.
    """
    grid = f.grid
    alpha = grid.alpha
    n = grid.size
    if n_x is None:
        n_x = 1 << math.ceil(math.log2(4 * n))
    period = 1.0 / grid.dt
    y_levels, y_weights = _log_y_levels(alpha, grid.t_nodes[0], grid.T_max, log_step)
    base = grid.t_weights * f.values
    total = 0.0
    for y, wy in zip(y_levels, y_weights):
        coef = np.zeros(n_x, dtype=complex)
        coef[1:n + 1] = base * np.exp(-2.0 * np.pi * grid.t_nodes * y)
        vals = np.fft.ifft(coef) * n_x  # F(x_k + i y), x_k = k * period / n_x
        total += wy * float(np.sum(np.abs(vals) ** 2)) * period / n_x
    return math.sqrt(fourier_measure_scale(alpha) * total)


# ------------------------------------------------------- reproducing formula


def _reproduce_integral(func, z0, alpha: float, rule: QuadratureRule) -> complex:
    vals = np.asarray(func(rule.nodes), dtype=complex)
    ker = (np.conj(rule.nodes) - z0) ** (-(alpha + 2.0))
    return complex(np.sum(rule.weights * vals * ker))


def _calibration_pair(alpha):
    return (lambda z: (z + 1j) ** (-(alpha + 2.0))), 2j


@lru_cache(maxsize=64)
def reproducing_constant(alpha: float, n_r: int = 96, n_theta: int = 192) -> complex:
    """Constant ``c`` in ``f(z0) = c * int f(w) dA_alpha(w) / (conj(w) - z0)^(alpha+2)``
    for the standard measure, calibrated on ``f = (z + i)^-(alpha+2)``, ``z0 = 2i``.
    """
    alpha = _check_alpha(alpha)
    rule = halfplane_quadrature(alpha, n_r, n_theta)
    func, z0 = _calibration_pair(alpha)
    return complex(func(z0)) / _reproduce_integral(func, z0, alpha, rule)


def reproducing_constant_closed_form(alpha: float) -> complex:
    """``-(alpha+1) 2^alpha exp(-i pi alpha / 2) / pi``; equals ``-1/pi`` at alpha = 0."""
    return -(alpha + 1.0) * 2.0 ** alpha * np.exp(-0.5j * np.pi * alpha) / np.pi


def reproduce(func, z0, alpha: float, rule: QuadratureRule | None = None,
              tail_tol: float = 1e-6) -> complex:
    """Evaluate ``func(z0)`` through the reproducing-kernel integral."""
    alpha = _check_alpha(alpha)
    z0 = complex(z0)
    if z0.imag <= 0:
        raise ValueError("reproduce needs Im z0 > 0")
    if rule is None:
        rule = halfplane_quadrature(alpha)
    # nodes nearest the boundary point at infinity act as a tail probe
    far = np.abs(rule.nodes) > 0.5 * np.abs(rule.nodes).max()
    vals = np.asarray(func(rule.nodes), dtype=complex)
    if np.any(far):
        probe = float(np.max(np.abs(vals[far]) * (1.0 + np.abs(rule.nodes[far])) ** (alpha + 2.0)))
        peak = float(np.max(np.abs(vals)))
        if peak > 0 and probe > 1e6 * peak:
            warnings.warn("reproduce: integrand does not decay at infinity",
                          QuadratureTruncationWarning, stacklevel=2)
    ker = (np.conj(rule.nodes) - z0) ** (-(alpha + 2.0))
    return reproducing_constant(alpha) * complex(np.sum(rule.weights * vals * ker))


def gamma_ratio(n: int, alpha: float) -> float:
    """``(alpha+2)(alpha+3)...(alpha+n+1) = Gamma(n+2+alpha) / Gamma(alpha+2)``."""
    return float(np.exp(special.gammaln(n + 2.0 + alpha) - special.gammaln(alpha + 2.0)))
