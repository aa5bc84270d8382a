"""Operator-series expansion of a quasi-parabolic composition operator.

For ``phi(z) = p z + psi(z)`` write ``psi_p(z) = psi(z / p)`` so that
``C_phi = V_p C_{z + psi_p}``, and

    C_{z + psi_p} = sum_n c_n T_tau^n D_{phi_n},   tau = psi_p - i beta,

with ``c_n = Gamma(n+2+a) / (n! Gamma(a+2))``. Every term has norm at most
``c_n delta^n`` where ``delta`` bounds ``|tau| / beta`` on the image of
``psi``; the remainder after ``M`` terms is certified by the binomial tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .operators import FourierOperator, _shift_steps, dilation_op, phi_n_symbol
from .spaces import HalfPlaneGrid
from .symbols import ExpPolySymbol, image_enclosure, select_beta

__all__ = [
    "SeriesPlan",
    "SeriesCapError",
    "series_coefficient",
    "tail_bound",
    "plan_series",
    "series_terms",
    "assemble_series",
]

M_CAP = 10_000


class SeriesCapError(ValueError):
    """The truncation order needed for the target exceeds the cap."""


def series_coefficient(n, alpha: float):
    """``Gamma(n+2+a) / (n! Gamma(a+2))`` via log-Gamma."""
    n = np.asarray(n, dtype=float)
    val = np.exp(special.gammaln(n + 2.0 + alpha) - special.gammaln(n + 1.0)
                 - special.gammaln(alpha + 2.0))
    return float(val) if val.ndim == 0 else val


def _tail_closed_alpha0(M: int, delta: float) -> float:
    return delta ** (M + 1) * ((M + 1) * (1.0 - delta) + 1.0) / (1.0 - delta) ** 2


def _tail_sum(M: int, delta: float, alpha: float) -> float:
    # ascending partial sums; once the term ratio r_n = delta (n+2+a)/(n+1)
    # is below 1 it decreases, so the rest is at most term * r / (1 - r)
    log_d = math.log(delta)
    lg_a2 = special.gammaln(alpha + 2.0)
    total = 0.0
    n = M + 1
    eps = np.finfo(float).eps
    while True:
        term = math.exp(special.gammaln(n + 2.0 + alpha) - special.gammaln(n + 1.0) - lg_a2
                        + n * log_d)
        total += term
        r = delta * (n + 2.0 + alpha) / (n + 1.0)
        if r < 1.0 and term < 1e-3 * eps * total:
            return total + term * r / (1.0 - r)
        n += 1


def tail_bound(M: int, delta: float, alpha: float, method: str = "auto") -> float:
    """``sum_{n > M} c_n delta^n``.

    ``method="auto"`` uses the closed form at ``alpha = 0`` and direct
    summation otherwise; ``"sum"`` and ``"closed"`` force one route.
    """
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    if M < 0:
        raise ValueError("M must be non-negative")
    if delta == 0.0:
        return 0.0
    if method == "closed" or (method == "auto" and alpha == 0):
        if alpha != 0:
            raise ValueError("closed form is available for alpha = 0 only")
        return _tail_closed_alpha0(M, delta)
    if method not in ("auto", "sum"):
        raise ValueError(f"unknown method {method!r}")
    return _tail_sum(M, delta, alpha)


@dataclass(frozen=True)
class SeriesPlan:
    beta: float
    delta: float
    alpha: float
    p: float
    M: int
    coefficients: np.ndarray
    tail: float

    def to_dict(self) -> dict:
        return {"beta": self.beta, "delta": self.delta, "alpha": self.alpha, "p": self.p,
                "M": self.M, "tail": self.tail}


def plan_series(psi: ExpPolySymbol, p: float, alpha: float, eps_target: float,
                margin: float = 0.0) -> SeriesPlan:
    """Choose ``beta`` and the smallest ``M`` with ``tail_bound(M) <= eps_target``."""
    if not eps_target > 0:
        raise ValueError("eps_target must be positive")
    if not p > 0:
        raise ValueError("p must be positive")
    # psi(z / p) has the same image as psi
    K = image_enclosure(psi)
    beta, delta = select_beta(K, margin)
    if delta == 0.0:
        M = 0
    else:
        M = 0
        while tail_bound(M, delta, alpha) > eps_target:
            M += 1
            if M > M_CAP:
                raise SeriesCapError(f"delta = {delta:.6g} needs more than {M_CAP} terms")
    coefs = series_coefficient(np.arange(M + 1), alpha)
    return SeriesPlan(beta, delta, float(alpha), float(p), M, np.atleast_1d(coefs),
                      tail_bound(M, delta, alpha))


def _tau_apply(c0: complex, shifts, mat: np.ndarray) -> np.ndarray:
    """``T_tau @ mat`` for ``T_tau = c0 I + sum c_k (shift by k_k rows)``."""
    out = c0 * mat
    n = mat.shape[0]
    for c, k in shifts:
        if k == 0:
            out += c * mat
        elif k < n:
            out[k:] += c * mat[:n - k]
    return out


def series_terms(plan: SeriesPlan, psi: ExpPolySymbol, grid: HalfPlaneGrid,
                 n_stop: int | None = None):
    """Yield ``(n, c_n T_tau^n D_{phi_n})`` for ``n = 0 .. n_stop`` (default
    ``plan.M``), without the dilation factor."""
    n_stop = plan.M if n_stop is None else n_stop
    psi_p = psi.dilated(plan.p)
    tau0 = psi_p.c0 - 1j * plan.beta
    shifts = [(c, _shift_steps(g / (2.0 * np.pi), grid)) for c, g in psi_p.terms]
    t = grid.t_nodes
    power = np.eye(grid.size, dtype=complex)
    for n in range(n_stop + 1):
        if n > 0:
            if plan.delta == 0.0:
                return
            power = _tau_apply(tau0, shifts, power)
        phi = phi_n_symbol(n, plan.beta, plan.alpha)(t)
        yield n, series_coefficient(n, plan.alpha) * power * phi[None, :]


def assemble_series(plan: SeriesPlan, psi: ExpPolySymbol, grid: HalfPlaneGrid) -> FourierOperator:
    """``V_p * sum_{n <= M} c_n T_tau^n D_{phi_n}``, summed in ascending ``n``."""
    if grid.alpha != plan.alpha:
        raise ValueError("grid and plan disagree on alpha")
    acc = np.zeros((grid.size, grid.size), dtype=complex)
    for _, term in series_terms(plan, psi, grid):
        acc += term
    op = FourierOperator(grid, acc)
    if plan.p != 1:
        op = dilation_op(plan.p, grid) @ op
    return op
