"""Essential-spectrum formula and numerical diagnostics.

Spectral parameters follow the transform convention ``lambda(z, t) =
exp(2 pi i z t)``; the set ``{exp(i z t) : t >= 0}`` is the same curve with
``t`` rescaled by ``2 pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from .numerics import eigenvalues, gauss_legendre
from .operators import DiskOperator, FourierOperator, weighted_adjoint
from .symbols import RangeCloud

__all__ = [
    "SpectrumSet",
    "MOProfile",
    "NormalityProfile",
    "essential_spectrum_formula",
    "finite_section_eigs",
    "gaussian_probe",
    "residual_check",
    "smallest_residual",
    "essential_normality_diag",
    "vmo_profile",
    "hausdorff_distance",
]


@dataclass(frozen=True, eq=False)
class SpectrumSet:
    source_range: RangeCloud
    t_max: float
    t_count: int
    points: np.ndarray
    parametric: list = field(default_factory=list)

    @property
    def t_resolution(self) -> float:
        return self.t_max / (self.t_count - 1)


def essential_spectrum_formula(range_cloud: RangeCloud, t_max: float, t_count: int) -> SpectrumSet:
    """``{exp(2 pi i z t) : z in range, t in [0, t_max]} U {0}`` on a uniform t-grid.

    ``2 pi t_max min Im z >= 30`` is required so each curve ends within
    ``1e-13`` of the origin.
    """
    z = np.asarray(range_cloud.points, dtype=complex)
    if z.size == 0:
        raise ValueError("empty range")
    if np.any(z.imag <= 0):
        raise ValueError("range points must lie in the upper half-plane")
    if t_count < 2:
        raise ValueError("t_count must be at least 2")
    if 2.0 * np.pi * t_max * z.imag.min() < 30.0 - 1e-9:
        raise ValueError("t_max too small: 2 pi t_max min Im z must be at least 30")
    t = np.linspace(0.0, t_max, t_count)
    curves = np.exp(2j * np.pi * np.outer(z, t))
    points = np.concatenate([curves.ravel(), [0.0]])
    parametric = list(zip(z.tolist(), curves))
    return SpectrumSet(range_cloud, float(t_max), int(t_count), points, parametric)


def finite_section_eigs(op, method: str = "lapack") -> np.ndarray:
    """Eigenvalues of a finite section; Fourier-side matrices are first
    conjugated by the square root of the grid weights."""
    if isinstance(op, FourierOperator):
        s = np.sqrt(op.grid.ip_weights)
        return eigenvalues(s[:, None] * op.matrix / s[None, :], method)
    if isinstance(op, DiskOperator):
        return eigenvalues(op.matrix, method)
    return eigenvalues(op, method)


# ------------------------------------------------------- residuals


def gaussian_probe(grid, t0: float, width: float, x0: float = 0.0) -> np.ndarray:
    """``exp(-(t - t0)^2 / (2 width^2)) exp(-2 pi i x0 t)``; the factor
    ``exp(-2 pi i x0 t)`` places the probe near ``Re z = x0`` in space."""
    t = grid.t_nodes
    return np.exp(-0.5 * ((t - t0) / width) ** 2) * np.exp(-2j * np.pi * x0 * t)


def _weighted_ratio(mat, u, lam, w) -> float:
    r = mat @ u - lam * u
    return math.sqrt(np.sum(w * np.abs(r) ** 2) / np.sum(w * np.abs(u) ** 2))


def residual_check(op: FourierOperator, z: complex, t0: float, width: float,
                   x0: float | None = None, scan: int = 256) -> float:
    """``||(op - lambda) u|| / ||u||`` in the grid's weighted norm, with
    ``lambda = exp(2 pi i z t0)`` and ``u`` a Gaussian bump at ``t0``.

    With ``x0=None`` the spatial position of the bump is optimised over one
    alias period ``[0, 1/dt)``: a coarse scan of ``scan`` positions, then a
    bounded scalar refinement. The smallest residual found is returned.
    """
    grid = op.grid
    if width < 3.0 * grid.dt * (1.0 - 1e-9):
        raise ValueError("width must be at least three grid steps")
    if t0 - 4.0 * width < 0.0 or t0 + 4.0 * width > grid.T_max:
        raise ValueError("bump support [t0 - 4 width, t0 + 4 width] exceeds the grid")
    lam = np.exp(2j * np.pi * complex(z) * t0)
    w = grid.ip_weights
    mat = op.matrix
    if x0 is not None:
        return _weighted_ratio(mat, gaussian_probe(grid, t0, width, x0), lam, w)
    period = 1.0 / grid.dt
    xs = np.arange(scan) * period / scan
    # op @ u for all positions at once
    probes = np.stack([gaussian_probe(grid, t0, width, x) for x in xs], axis=1)
    res = mat @ probes - lam * probes
    vals = np.sqrt(np.sum(w[:, None] * np.abs(res) ** 2, axis=0)
                   / np.sum(w[:, None] * np.abs(probes) ** 2, axis=0))
    k = int(np.argmin(vals))
    step = period / scan
    opt = minimize_scalar(
        lambda x: _weighted_ratio(mat, gaussian_probe(grid, t0, width, x), lam, w),
        bounds=(xs[k] - step, xs[k] + step), method="bounded", options={"xatol": 1e-6 * step})
    return float(min(vals[k], opt.fun))


def smallest_residual(op: FourierOperator, lam: complex) -> float:
    """Smallest singular value of ``op - lambda`` in the weighted norm: the
    least residual any probe on this grid can reach."""
    s = np.sqrt(op.grid.ip_weights)
    m = s[:, None] * (op.matrix - lam * np.eye(op.grid.size)) / s[None, :]
    return float(np.linalg.svd(m, compute_uv=False)[-1])


# ------------------------------------------------------- essential normality


@dataclass(frozen=True, eq=False)
class NormalityProfile:
    column_norms: np.ndarray
    ratio: float
    head_max: float
    tail_max: float


def essential_normality_diag(op, weights=None) -> NormalityProfile:
    """Column norms of the self-commutator ``A* A - A A*``.

    For a :class:`FourierOperator` the adjoint and norms use the grid's
    weights; a plain matrix uses ``weights`` (default all ones). The ratio
    is the largest normalised column norm over the first third divided by
    the largest over the last third; an identically zero commutator
    reports 0.
    """
    if isinstance(op, FourierOperator):
        a = op.matrix
        w = op.grid.ip_weights
        a_star = weighted_adjoint(op).matrix
    else:
        a = np.asarray(op, dtype=complex)
        w = np.ones(a.shape[0]) if weights is None else np.asarray(weights, dtype=float)
        a_star = (a.conj().T * w[None, :]) / w[:, None]
    comm = a_star @ a - a @ a_star
    cols = np.sqrt(np.sum(w[:, None] * np.abs(comm) ** 2, axis=0) / w)
    n = cols.size
    third = max(1, n // 3)
    head = float(cols[:third].max())
    tail = float(cols[n - third:].max())
    if head == 0.0 and tail == 0.0:
        ratio = 0.0
    elif tail == 0.0:
        ratio = math.inf
    else:
        ratio = head / tail
    return NormalityProfile(cols, ratio, head, tail)


# ------------------------------------------------------- VMO profile


@dataclass(frozen=True, eq=False)
class MOProfile:
    r_levels: np.ndarray
    values: np.ndarray

    @staticmethod
    def box_area(r):
        """``|Q_z| = (1 + r)(1 - r)^2`` for ``|z| = r``."""
        r = np.asarray(r, dtype=float)
        return (1.0 + r) * (1.0 - r) ** 2


def _box_rule(r: float, theta: float, n_rad: int, n_ang: int):
    """Polar tensor rule on ``Q_z = {r <= |w| < 1, |arg w - theta| <= 1 - r}``."""
    h = min(1.0 - r, np.pi)
    rad = gauss_legendre(n_rad, r, 1.0)
    ang = gauss_legendre(n_ang, theta - h, theta + h)
    nodes = (rad.nodes[:, None] * np.exp(1j * ang.nodes)[None, :]).ravel()
    weights = (rad.weights[:, None] * rad.nodes[:, None] * ang.weights[None, :]).ravel()
    return nodes, weights


def vmo_profile(f, r_levels, theta_count: int = 16, n_rad: int = 32, n_ang: int = 16,
                thetas=None) -> MOProfile:
    """Per level ``r``, the largest mean oscillation
    ``|Q_z|^-1 int_{Q_z} |f - f_Q| dA`` over ``theta_count`` equally spaced
    base points ``z = r e^{i theta}``. Each box uses an ``n_rad x n_ang``
    polar Gauss-Legendre rule (at least 256 nodes).

    ``thetas`` replaces the equally spaced angles. Fixed angles miss
    oscillation that approaches a boundary point tangentially; for a point
    ``x + i`` of the half-plane with ``x -> inf`` the Cayley image has
    ``1 - r ~ 2 / x^2`` and ``theta ~ 2 / x``, so a scan of angles
    shrinking like ``sqrt(1 - r)`` is needed to see it.
    """
    if n_rad * n_ang < 256:
        raise ValueError("box rule needs at least 256 nodes")
    levels = np.asarray(r_levels, dtype=float)
    if np.any((levels <= 0) | (levels >= 1)):
        raise ValueError("r_levels must lie in (0, 1)")
    if thetas is None:
        thetas = 2.0 * np.pi * np.arange(theta_count) / theta_count
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    out = np.empty(levels.size)
    for i, r in enumerate(levels):
        best = 0.0
        for th in thetas:
            nodes, wts = _box_rule(r, th, n_rad, n_ang)
            vals = np.asarray(f(nodes), dtype=complex) * np.ones(nodes.size)
            area = wts.sum()
            mean = np.sum(wts * vals) / area
            best = max(best, float(np.sum(wts * np.abs(vals - mean)) / area))
        out[i] = best
    return MOProfile(levels, out)


# ------------------------------------------------------- metric


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two finite planar point sets."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("point sets must be non-empty")
    pa = np.column_stack([a.real, a.imag])
    pb = np.column_stack([b.real, b.imag])
    d_ab = cKDTree(pb).query(pa)[0].max()
    d_ba = cKDTree(pa).query(pb)[0].max()
    return float(max(d_ab, d_ba))
