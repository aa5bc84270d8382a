"""Translation symbols, the beta selection for the series expansion, and
local essential ranges at infinity (half-plane) and at 1 (disk).

An exp-polynomial symbol is ``psi(z) = c0 + sum_k c_k exp(i gamma_k z)``
with ``gamma_k > 0``; each term is bounded by ``|c_k|`` on the closed upper
half-plane, so ``Im psi >= Im c0 - sum |c_k|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .spaces import inverse_cayley

__all__ = [
    "InfeasibleSymbolError",
    "ExpPolySymbol",
    "SampledBoundarySymbol",
    "Enclosure",
    "RangeCloud",
    "eval_symbol",
    "im_lower_bound",
    "image_enclosure",
    "select_beta",
    "common_frequency",
    "frequency_classes",
    "sample_boundary",
    "sample_disk_boundary",
    "essential_range_sampled",
    "essential_range_exppoly",
    "pullback_range_disk",
]

# Any real ratio has a fraction p/q with q <= Q within 1/(q Q), so a cap of
# 10^6 would pass every float at tolerance 10^-9. A cap of 1000 leaves a
# chance of about 10^-3 that a generic ratio is misread as rational.
FREQ_DENOMINATOR_CAP = 1000
FREQ_TOL = 1e-9


class InfeasibleSymbolError(ValueError):
    """The symbol does not satisfy the quasi-parabolic hypotheses."""


@dataclass(frozen=True)
class ExpPolySymbol:
    c0: complex
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((complex(c), float(g)) for c, g in self.terms)
        for _, g in terms:
            if not (g > 0 and math.isfinite(g)):
                raise ValueError(f"frequencies must be positive, got {g}")
        object.__setattr__(self, "c0", complex(self.c0))
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_spec(cls, spec: dict) -> "ExpPolySymbol":
        """Build from ``{"c0": [re, im], "terms": [{"c": [re, im], "gamma": g}, ...]}``."""
        c0 = complex(*spec["c0"])
        terms = tuple((complex(*t["c"]), float(t["gamma"])) for t in spec.get("terms", ()))
        return cls(c0, terms)

    def to_spec(self) -> dict:
        return {"c0": [self.c0.real, self.c0.imag],
                "terms": [{"c": [c.real, c.imag], "gamma": g} for c, g in self.terms]}

    @property
    def gammas(self) -> np.ndarray:
        return np.array([g for _, g in self.terms], dtype=float)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=complex)

    def __call__(self, z):
        return eval_symbol(self, z)

    def dilated(self, p: float) -> "ExpPolySymbol":
        """The symbol ``z -> psi(z / p)``."""
        if not p > 0:
            raise ValueError("dilation parameter must be positive")
        return ExpPolySymbol(self.c0, tuple((c, g / p) for c, g in self.terms))

    def shifted(self, a: complex) -> "ExpPolySymbol":
        """``psi - a`` (constant shift)."""
        return ExpPolySymbol(self.c0 - a, self.terms)


def eval_symbol(psi: ExpPolySymbol, z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag < 0):
        raise ValueError("symbol is evaluated on the closed upper half-plane only")
    out = np.full(z.shape, psi.c0, dtype=complex)
    for c, g in psi.terms:
        out = out + c * np.exp(1j * g * z)
    return complex(out) if out.ndim == 0 else out


def im_lower_bound(psi: ExpPolySymbol) -> float:
    """``Im c0 - sum |c_k|``; raises if not positive."""
    eps = psi.c0.imag - float(np.sum(np.abs(psi.coefficients)))
    if not eps > 0:
        raise InfeasibleSymbolError(
            f"Im psi is not bounded below by a positive constant (bound {eps:g})")
    return eps


@dataclass(frozen=True)
class Enclosure:
    """Closed disk ``|zeta - center| <= radius`` inside the upper half-plane."""

    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius < 0:
            raise ValueError("radius must be non-negative")

    @property
    def feasible(self) -> bool:
        return self.center.imag > self.radius

    def contains(self, z, tol: float = 0.0):
        return np.abs(np.asarray(z) - self.center) <= self.radius + tol


def image_enclosure(psi: ExpPolySymbol) -> Enclosure:
    im_lower_bound(psi)
    return Enclosure(psi.c0, float(np.sum(np.abs(psi.coefficients))))


def select_beta(K: Enclosure, margin: float = 0.0) -> tuple[float, float]:
    """Minimise ``delta(beta) = (|i beta - c| + r) / beta`` over ``beta > 0``.

    Returns ``(beta, delta)``. With ``c = a + ib`` the minimiser is
    ``beta = b + u`` where ``u = (a^2 b + |a| r sqrt(a^2 + b^2 - r^2)) / (b^2 - r^2)``
    (stationarity of ``delta``). A positive ``margin`` inflates the returned
    value to ``delta + margin (1 - delta)``.
    """
    if not K.feasible:
        raise InfeasibleSymbolError(
            f"enclosure disk({K.center}, {K.radius}) is not compact in the upper half-plane")
    if not 0.0 <= margin < 1.0:
        raise ValueError("margin must lie in [0, 1)")
    a, b, r = abs(K.center.real), K.center.imag, K.radius
    u = (a * a * b + a * r * math.sqrt(a * a + b * b - r * r)) / (b * b - r * r)
    beta = b + u
    delta = (math.hypot(a, beta - b) + r) / beta
    delta = delta + margin * (1.0 - delta)
    if not delta < 1.0:
        raise InfeasibleSymbolError("no beta gives delta < 1")
    return beta, delta


# ------------------------------------------------------- frequency arithmetic


def _ratio_fraction(ratio: float) -> Fraction | None:
    frac = Fraction(ratio).limit_denominator(FREQ_DENOMINATOR_CAP)
    if abs(float(frac) - ratio) <= FREQ_TOL * abs(ratio):
        return frac
    return None


def common_frequency(gammas) -> float | None:
    """Largest ``d`` with every ``gamma_k`` an integer multiple of ``d``,
    or ``None`` when some ratio has no rational approximation with
    denominator at most ``FREQ_DENOMINATOR_CAP`` within relative tolerance
    ``FREQ_TOL``.
    """
    gammas = [float(g) for g in gammas]
    if not gammas:
        return None
    g0 = gammas[0]
    fracs = []
    for g in gammas:
        f = _ratio_fraction(g / g0)
        if f is None:
            return None
        fracs.append(f)
    den = 1
    for f in fracs:
        den = den * f.denominator // math.gcd(den, f.denominator)
    nums = [f.numerator * (den // f.denominator) for f in fracs]
    common = 0
    for n in nums:
        common = math.gcd(common, n)
    return g0 * common / den


def frequency_classes(gammas) -> list[list[int]]:
    """Partition term indices into classes of pairwise rationally dependent
    frequencies."""
    classes: list[list[int]] = []
    for k, g in enumerate(gammas):
        for cl in classes:
            if _ratio_fraction(g / gammas[cl[0]]) is not None:
                cl.append(k)
                break
        else:
            classes.append([k])
    return classes


# ------------------------------------------------------- boundary samples


@dataclass(frozen=True, eq=False)
class SampledBoundarySymbol:
    """Boundary values ``psi*(x)`` on ``[-X, X]``."""

    x_samples: np.ndarray
    values: np.ndarray
    X: float

    MIN_SAMPLES = 10_000

    def __post_init__(self):
        x = np.asarray(self.x_samples, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.shape != v.shape or x.ndim != 1:
            raise ValueError("x_samples and values must be 1-d arrays of equal length")
        if x.size < self.MIN_SAMPLES:
            raise ValueError(f"need at least {self.MIN_SAMPLES} samples, got {x.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("boundary values must be finite")
        object.__setattr__(self, "x_samples", x)
        object.__setattr__(self, "values", v)


def boundary_nodes(X: float, per_block: int = 4096) -> np.ndarray:
    """Sample positions on ``[-X, X]``: blocks ``[0, 1], [1, 2], [2, 4], ...``
    in ``|x|``, uniform within each block, mirrored to negative ``x``.

    Every window ``|x| > n`` with ``n <= X / 2`` then keeps at least
    ``per_block`` samples.
    """
    if X <= 1:
        raise ValueError("X must exceed 1")
    edges = [0.0, 1.0]
    while edges[-1] < X:
        edges.append(min(2.0 * edges[-1], X))
    blocks = [np.linspace(lo, hi, per_block, endpoint=False) + (hi - lo) / (2 * per_block)
              for lo, hi in zip(edges[:-1], edges[1:])]
    pos = np.concatenate(blocks)
    return np.concatenate([-pos[::-1], pos])


def sample_boundary(func, X: float, per_block: int = 4096) -> SampledBoundarySymbol:
    x = boundary_nodes(X, per_block)
    return SampledBoundarySymbol(x, np.asarray(func(x), dtype=complex), float(X))


def sample_disk_boundary(func, X: float, per_block: int = 4096):
    """Sample ``eta*`` at arc positions ``theta`` near the point 1 of the
    circle, chosen so that ``inverse_cayley(e^{i theta})`` covers ``[-X, X]``
    with the same block density as :func:`sample_boundary`.

    Returns ``(theta, values)``.
    """
    x = boundary_nodes(X, per_block)
    # inverse_cayley(e^{i theta}) = -cot(theta / 2); theta in (0, 2 pi)
    theta = 2.0 * (np.pi - np.arctan2(1.0, -x))
    theta = np.mod(theta, 2.0 * np.pi)
    return theta, np.asarray(func(np.exp(1j * theta)), dtype=complex)


# ------------------------------------------------------- occupancy ranges


@dataclass(frozen=True, eq=False)
class RangeCloud:
    """Cell centres of an occupancy grid of side ``epsilon``."""

    points: np.ndarray
    epsilon: float
    n_max: float

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=complex).ravel())

    @property
    def cells(self) -> set:
        return set(zip(*_cell_index(self.points, self.epsilon)))


def _cell_index(values, eps):
    v = np.asarray(values, dtype=complex)
    return (np.floor(v.real / eps).astype(np.int64), np.floor(v.imag / eps).astype(np.int64))


def _occupied(values, eps) -> set:
    i, j = _cell_index(values, eps)
    return set(zip(i.tolist(), j.tolist()))


def _centers(cells, eps) -> np.ndarray:
    if not cells:
        return np.zeros(0, dtype=complex)
    arr = np.array(sorted(cells), dtype=float)
    return (arr[:, 0] + 0.5) * eps + 1j * (arr[:, 1] + 0.5) * eps


def essential_range_sampled(psi_star: SampledBoundarySymbol, eps: float,
                            n_schedule) -> RangeCloud:
    """Occupancy estimate of the local essential range at infinity.

    A cell of side ``eps`` is kept iff, for every ``n`` in ``n_schedule``,
    some sample with ``|x| > n`` has its value inside the cell.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    sched = np.sort(np.asarray(n_schedule, dtype=float))
    if sched.size == 0:
        raise ValueError("n_schedule must be non-empty")
    if sched[-1] >= psi_star.X:
        raise ValueError("max(n_schedule) must be below the sampling extent X")
    ax = np.abs(psi_star.x_samples)
    kept = None
    # windows are nested, so the deepest window decides; shallower windows
    # are still intersected to honour the definition literally
    for n in sched[::-1]:
        occ = _occupied(psi_star.values[ax > n], eps)
        kept = occ if kept is None else kept & occ
        if not kept:
            break
    if not kept:
        raise ValueError("empty range estimate; the symbol is under-sampled")
    return RangeCloud(_centers(kept, eps), float(eps), float(sched[-1]))


def _class_curve(coefs, gammas, resolution) -> np.ndarray:
    """Values of ``sum c_k exp(i gamma_k x)`` over one common period."""
    d = common_frequency(gammas)
    period = 2.0 * math.pi / d
    speed = float(np.sum(np.abs(coefs) * gammas))
    n = max(64, int(math.ceil(period * speed / (0.25 * resolution))))
    x = np.linspace(0.0, period, n, endpoint=False)
    return np.exp(1j * np.outer(x, gammas)) @ coefs


def essential_range_exppoly(psi: ExpPolySymbol, resolution: float) -> RangeCloud:
    """Closed-form local essential range at infinity, reduced to an
    occupancy grid of side ``resolution``.

    Terms are grouped into classes of rationally dependent frequencies. A
    class traces a closed curve over its common period; independent classes
    combine as a Minkowski sum (Kronecker density of the joint phases).
    """
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    if not psi.terms:
        return RangeCloud(np.array([psi.c0]), float(resolution), math.inf)
    gam = psi.gammas
    coefs = psi.coefficients
    # accumulate Minkowski sums at sub-cell resolution, then snap
    fine = 0.25 * resolution
    acc = np.array([0j])
    for cl in frequency_classes(gam):
        curve = _class_curve(coefs[cl], gam[cl], resolution)
        curve = _centers(_occupied(curve, fine), fine)
        acc = (acc[:, None] + curve[None, :]).ravel()
        acc = _centers(_occupied(acc, fine), fine)
    cells = _occupied(psi.c0 + acc, resolution)
    return RangeCloud(_centers(cells, resolution), float(resolution), math.inf)


def pullback_range_disk(theta, values, eps: float, n_schedule, X: float | None = None) -> RangeCloud:
    """Local essential range at the boundary point 1 of the disk.

    Samples ``eta*(e^{i theta})`` are carried to the real line by
    ``x = inverse_cayley(e^{i theta})`` and handed to
    :func:`essential_range_sampled`.
    """
    theta = np.asarray(theta, dtype=float)
    w = np.exp(1j * theta)
    keep = np.abs(1.0 - w) > 0
    x = inverse_cayley(w[keep]).real
    if X is None:
        X = float(np.max(np.abs(x)))
    sym = SampledBoundarySymbol(x, np.asarray(values)[keep], X)
    return essential_range_sampled(sym, eps, n_schedule)
