"""Dense complex linear algebra, quadrature rules and truncated polynomials.

Everything here is a pure function of its inputs. Matrices are plain
``numpy`` arrays of dtype ``complex128``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

__all__ = [
    "QuadratureRule",
    "Poly",
    "as_complex_matrix",
    "eigenvalues",
    "hessenberg_qr_eigenvalues",
    "operator_norm",
    "poly_compose",
    "gauss_legendre",
    "disk_quadrature",
]

MAX_EIG_DIM = 2048


class ConvergenceError(RuntimeError):
    """Raised when the QR iteration exceeds its iteration cap."""


def as_complex_matrix(m) -> np.ndarray:
    """Validate and return ``m`` as a finite 2-d complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


# ---------------------------------------------------------------- eigenvalues


def _householder_hessenberg(a: np.ndarray) -> np.ndarray:
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0
    return h


def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closer to d
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr / 4.0 - det)
    l1 = tr / 2.0 + disc
    l2 = tr / 2.0 - disc
    return l1 if abs(l1 - d) < abs(l2 - d) else l2


def hessenberg_qr_eigenvalues(m, max_iter_per_eig: int = 60) -> np.ndarray:
    """Eigenvalues by Householder reduction to Hessenberg form and
    single-shift complex QR sweeps with Wilkinson shifts and deflation.

    Intended for small matrices; cost is O(n^3) Python-level Givens work.
    """
    a = as_complex_matrix(m)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if n == 0:
        return np.zeros(0, dtype=complex)
    h = _householder_hessenberg(a)
    eigs = np.empty(n, dtype=complex)
    hi = n - 1
    iters = 0
    eps = np.finfo(float).eps
    while hi >= 0:
        if hi == 0:
            eigs[0] = h[0, 0]
            break
        # find the active unreduced block [lo, hi]
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            if sub <= eps * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])) or sub < 1e-300:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs[hi] = h[hi, hi]
            hi -= 1
            iters = 0
            continue
        iters += 1
        if iters > max_iter_per_eig:
            raise ConvergenceError("QR iteration did not converge; input may be ill-conditioned")
        if iters % 11 == 0:
            # exceptional shift breaks cycles
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        # one explicit shifted QR sweep on the block via Givens rotations
        blk = slice(lo, hi + 1)
        for i in range(lo, hi + 1):
            h[i, i] -= mu
        rots = []
        for k in range(lo, hi):
            x, y = h[k, k], h[k + 1, k]
            r = math.hypot(abs(x), abs(y))
            if r == 0.0:
                c, s = 1.0, 0.0
            else:
                c, s = x / r, y / r
            rots.append((c, s))
            rows = h[[k, k + 1], k:hi + 1]
            h[k, k:hi + 1] = np.conj(c) * rows[0] + np.conj(s) * rows[1]
            h[k + 1, k:hi + 1] = -s * rows[0] + c * rows[1]
        for k, (c, s) in zip(range(lo, hi), rots):
            cols = h[lo:min(k + 2, hi) + 1, [k, k + 1]]
            h[lo:min(k + 2, hi) + 1, k] = c * cols[:, 0] + s * cols[:, 1]
            h[lo:min(k + 2, hi) + 1, k + 1] = -np.conj(s) * cols[:, 0] + np.conj(c) * cols[:, 1]
        for i in range(lo, hi + 1):
            h[i, i] += mu
        del blk
    return eigs


def eigenvalues(m, method: str = "lapack") -> np.ndarray:
    """All eigenvalues of a square complex matrix, with multiplicity.

    Parameters
    ----------
    m
        Square matrix, dimension at most 2048.
    method
        ``"lapack"`` (default) or ``"qr"`` for the in-module Hessenberg/QR
        iteration.
    """
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if a.shape[0] > MAX_EIG_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds {MAX_EIG_DIM}")
    if method == "qr":
        return hessenberg_qr_eigenvalues(a)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc


def operator_norm(m, ip_weights=None) -> float:
    """Largest singular value of ``m`` w.r.t. ``<x, y> = sum w_j x_j conj(y_j)``."""
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if ip_weights is None:
        return float(np.linalg.norm(a, 2)) if a.size else 0.0
    w = np.asarray(ip_weights, dtype=float)
    if w.shape != (a.shape[0],):
        raise ValueError(f"weights of length {w.size} do not match dimension {a.shape[0]}")
    if np.any(w <= 0):
        raise ValueError("inner-product weights must be positive")
    s = np.sqrt(w)
    return float(np.linalg.norm(s[:, None] * a / s[None, :], 2))


# ---------------------------------------------------------------- polynomials


@dataclass(frozen=True)
class Poly:
    """Polynomial with complex coefficients, ``coefficients[k]`` multiplying z^k."""

    coefficients: np.ndarray
    max_degree: int = field(default=-1)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        md = self.max_degree if self.max_degree >= 0 else c.size - 1
        if c.size > md + 1:
            raise ValueError(f"{c.size} coefficients exceed max_degree {md}")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "max_degree", md)

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coefficients)[0]
        return int(nz[-1]) if nz.size else 0

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coefficients)

    def truncated(self, n: int) -> "Poly":
        c = self.coefficients[: n + 1]
        return Poly(np.pad(c, (0, n + 1 - c.size)), n)


def _mul_trunc(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    out = np.convolve(a, b)[: n + 1]
    return np.pad(out, (0, n + 1 - out.size))


def poly_compose(p: Poly, q: Poly, n: int) -> Poly:
    """Coefficients of p(q(z)) up to degree ``n``.

    Truncated Horner evaluation; coefficient k of a product only depends on
    coefficients of degree <= k, so truncating every step is exact.
    """
    qc = np.pad(q.coefficients[: n + 1], (0, max(0, n + 1 - q.coefficients.size)))
    acc = np.zeros(n + 1, dtype=complex)
    for c in p.coefficients[::-1]:
        acc = _mul_trunc(acc, qc, n)
        acc[0] += c
    return Poly(acc, n)


# ---------------------------------------------------------------- quadrature


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    domain_tag: str
    alpha: float | None = None

    def __post_init__(self):
        if np.any(np.asarray(self.weights) <= 0):
            raise ValueError("quadrature weights must be positive")

    def integrate(self, values) -> complex:
        return complex(np.sum(self.weights * np.asarray(values)))

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))


def gauss_legendre(n: int, a: float = 0.0, b: float = 1.0) -> QuadratureRule:
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureRule(a + half * (x + 1.0), half * w, "interval")


def disk_quadrature(alpha: float, n_r: int, n_theta: int) -> QuadratureRule:
    """Tensor rule for ``(1 - |z|^2)^alpha dA`` on the unit disk.

    Radial part: Gauss-Jacobi in ``s = r^2`` with weight ``(1 - s)^alpha``,
    exact for ``r^(2j)`` up to ``j < 2 n_r``. Angular part: uniform, exact
    for ``e^{i m theta}`` with ``0 < |m| < n_theta``.
    """
    if not alpha > -1:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    # Jacobi weight (1-x)^a (1+x)^b on [-1, 1]; s = (1+x)/2
    x, w = special.roots_jacobi(n_r, alpha, 0.0)
    s = 0.5 * (1.0 + x)
    ws = w * 0.5 ** (alpha + 1.0)  # weights for int_0^1 g(s) (1-s)^alpha ds
    r = np.sqrt(s)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    # dA = r dr dtheta = (1/2) ds dtheta
    nodes = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = (0.5 * ws[:, None] * np.full(n_theta, 2.0 * np.pi / n_theta)[None, :]).ravel()
    return QuadratureRule(nodes, weights, "disk_weighted", alpha)
