"""
Local essential ranges at infinity
==================================

Boundary values are sampled on dyadic blocks out to ``|x| = 10^4``; a cell
of the occupancy grid survives when it is hit beyond every cutoff in the
schedule. We compare with the closed forms for exponential polynomials and
with the same computation done on the disk.
"""

import math

import numpy as np

from qpspectra.spaces import inverse_cayley
from qpspectra.spectra import hausdorff_distance
from qpspectra.symbols import (ExpPolySymbol, essential_range_exppoly, essential_range_sampled,
                               pullback_range_disk, sample_boundary, sample_disk_boundary)

eps = 0.02
schedule = (10, 100, 1000, 4000)

circle = ExpPolySymbol(2j, ((0.5, 1.0),))
annulus = ExpPolySymbol(3j, ((0.5, 1.0), (0.25, math.sqrt(2))))
for name, psi in [("circle", circle), ("annulus", annulus)]:
    sampled = essential_range_sampled(sample_boundary(psi, 1e4), eps, schedule)
    closed = essential_range_exppoly(psi, eps)
    hd = hausdorff_distance(sampled.points, closed.points)
    print(f"{name:8s} sampled cells {len(sampled.points):5d}  closed-form cells "
          f"{len(closed.points):5d}  Hausdorff {hd:.4f}")

# a symbol continuous at infinity collapses to its limit
cont = essential_range_sampled(sample_boundary(lambda x: 2j + 1 / (x + 1j), 1e4), eps, schedule)
print(f"\n2i + 1/(x+i): {len(cont.points)} cell(s) at {cont.points}")

# on the disk: the same boundary function, read off near the point 1
theta, vals = sample_disk_boundary(lambda w: circle(inverse_cayley(w).real), 1e4)
disk = pullback_range_disk(theta, vals, eps, schedule)
half = essential_range_sampled(sample_boundary(circle, 1e4), eps, schedule)
print(f"\ndisk vs half-plane cells: {len(disk.cells)} vs {len(half.cells)}, "
      f"symmetric difference {len(disk.cells ^ half.cells)}")
