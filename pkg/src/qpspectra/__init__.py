"""Quasi-parabolic composition operators on weighted Bergman spaces:
operator-series assembly, essential-spectrum formula and numerical
diagnostics."""

__version__ = "0.1.0"

from .approximation import SeriesPlan, assemble_series, plan_series, series_coefficient, tail_bound
from .numerics import Poly, QuadratureRule, disk_quadrature, eigenvalues, operator_norm, poly_compose
from .operators import (DiskOperator, FourierOperator, composition_disk, dilation_op,
                        grid_for_symbol, multiplier_op, onb_norm, phi_n_symbol, shift_op,
                        toeplitz_disk, toeplitz_exppoly, weighted_adjoint)
from .spaces import (GridFunction, HalfPlaneGrid, SpaceParams, cayley, fourier_norm,
                     inverse_cayley, kernel_eval, phi_map, pw_forward, pw_inverse, reproduce)
from .spectra import (MOProfile, SpectrumSet, essential_normality_diag, essential_spectrum_formula,
                      finite_section_eigs, hausdorff_distance, residual_check, vmo_profile)
from .symbols import (Enclosure, ExpPolySymbol, RangeCloud, SampledBoundarySymbol,
                      essential_range_exppoly, essential_range_sampled, eval_symbol,
                      image_enclosure, im_lower_bound, pullback_range_disk, select_beta)
