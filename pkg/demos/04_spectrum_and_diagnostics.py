"""
Essential spectrum and what finite sections can say about it
============================================================

The formula set ``{exp(2 pi i z t) : z in range, t >= 0} U {0}`` is drawn
for the test symbol. Finite sections give eigenvalues, Gaussian probes give
residuals, and the self-commutator shows decay. The last block explains
why the residual certificate does not reach 0.05 for this symbol.
"""

import math
from pathlib import Path

import numpy as np

from qpspectra.approximation import assemble_series, plan_series
from qpspectra.operators import grid_for_symbol
from qpspectra.reporting import svg_curves
from qpspectra.spaces import inverse_cayley
from qpspectra.spectra import (essential_normality_diag, essential_spectrum_formula,
                               residual_check, smallest_residual, vmo_profile)
from qpspectra.symbols import ExpPolySymbol, essential_range_exppoly

psi = ExpPolySymbol(2j, ((0.5, 1.0),))
rng = essential_range_exppoly(psi, 0.02)
spec = essential_spectrum_formula(rng, 30 / (2 * math.pi * 1.5), 600)
out = Path("demo_out")
svg_curves(out / "spectrum.svg", [c for _, c in spec.parametric[::4]], markers=[0j],
           title="formula set for 2i + 0.5 e^{iz}")
print(f"formula set: {len(spec.points)} points, drawn to {out / 'spectrum.svg'}")

grid = grid_for_symbol(psi, 0.0, 400, 2.2)
A = assemble_series(plan_series(psi, 1.0, 0.0, 1e-12), psi, grid)

print("\n   t0     z             best probe   floor sigma_min")
for t0 in (0.1, 0.3, 0.6):
    for z in (2.5j, 1.5j, 2j + 0.5):
        r = residual_check(A, z, t0, 4 * grid.dt, scan=64)
        lo = smallest_residual(A, np.exp(2j * np.pi * z * t0))
        print(f"  {t0:.2f}  {str(z):12s}  {r:.4f}       {lo:.4f}")

prof = essential_normality_diag(A)
print(f"\ncommutator head/tail ratio: {prof.ratio:.3e}")

# psi is periodic along the real direction. Around x + i with x large its
# oscillation over a hyperbolic ball stays of order one, so psi is not in
# the vanishing-oscillation class the spectral formula assumes. Fixed base
# angles miss this; angles shrinking with sqrt(1 - r) expose it.
eta = lambda w: psi(inverse_cayley(w))
for r in (0.999, 0.9999):
    fixed = vmo_profile(eta, [r]).values[0]
    tang = vmo_profile(eta, [r], thetas=np.geomspace(1e-4, 0.5, 120)).values[0]
    print(f"r={r}: mean oscillation, fixed angles {fixed:.2e}, tangential scan {tang:.3f}")
