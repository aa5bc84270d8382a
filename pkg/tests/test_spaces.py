import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpspectra.numerics import Poly, disk_quadrature
from qpspectra.spaces import (GridFunction, HalfPlaneGrid, QuadratureTruncationWarning,
                              SpaceParams, _reproduce_integral, cayley, fourier_norm,
                              halfplane_norm, halfplane_quadrature, inverse_cayley, kernel_eval,
                              periodic_bergman_norm, phi_map, pw_forward, pw_inverse, reproduce,
                              reproducing_constant, reproducing_constant_closed_form)

finite = st.floats(-5, 5, allow_nan=False)
upper = st.builds(complex, finite, st.floats(0.05, 5))


def laplace_pair(alpha, b=1.0):
    """t^(a+1) e^{-2 pi b t} and its transform Gamma(a+2) / (-2 pi i (z + i b))^(a+2)."""
    return (lambda t: t ** (alpha + 1) * np.exp(-2 * np.pi * b * t),
            lambda z: math.gamma(alpha + 2) / (-2j * np.pi * (z + 1j * b)) ** (alpha + 2))


def exact_fourier_norm(alpha, b=1.0):
    # Gamma(a+1)/2^(a+1) * int t^(a+1) e^{-4 pi b t} dt
    return math.sqrt(math.gamma(alpha + 1) / 2 ** (alpha + 1)
                     * math.gamma(alpha + 2) / (4 * math.pi * b) ** (alpha + 2))


class TestGrid:
    def test_nodes_exclude_zero(self):
        g = HalfPlaneGrid.uniform(0.0, 10, t_max=1.0)
        assert g.t_nodes[0] == pytest.approx(0.1)
        assert g.T_max == pytest.approx(1.0)
        assert np.all(g.t_weights > 0)

    def test_alpha_bound(self):
        with pytest.raises(ValueError):
            SpaceParams(-1.0)
        with pytest.raises(ValueError):
            HalfPlaneGrid.uniform(-1.5, 10, t_max=1.0)

    def test_grid_function_shape_and_finiteness(self):
        g = HalfPlaneGrid.uniform(0.0, 4, t_max=1.0)
        with pytest.raises(ValueError):
            GridFunction(g, np.zeros(3))
        with pytest.raises(ValueError):
            GridFunction(g, np.array([0, np.nan, 0, 0]))


class TestFourierNorm:
    def test_zero(self):
        g = HalfPlaneGrid.uniform(0.0, 400, t_max=20.0)
        assert fourier_norm(GridFunction(g, np.zeros(400))) == 0.0

    def test_example_grid(self):
        # the literal example grid (dt = 0.05) resolves e^{-4 pi t} with
        # about 1.6 % trapezoid error
        f, _ = laplace_pair(0.0)
        g = HalfPlaneGrid.uniform(0.0, 400, t_max=20.0)
        assert fourier_norm(g.sample(f)) == pytest.approx(math.sqrt(1 / (32 * math.pi ** 2)),
                                                          rel=2e-2)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_closed_form_on_fine_grid(self, alpha):
        f, _ = laplace_pair(alpha)
        g = HalfPlaneGrid.uniform(alpha, 4000, t_max=4.0)
        assert fourier_norm(g.sample(f)) == pytest.approx(exact_fourier_norm(alpha), rel=1e-5)

    @given(st.complex_numbers(max_magnitude=100, allow_nan=False).filter(
        lambda c: c == 0 or abs(c) > 1e-100))
    def test_homogeneous(self, c):
        g = HalfPlaneGrid.uniform(0.5, 50, t_max=2.0)
        f = g.sample(laplace_pair(0.5)[0])
        assert fourier_norm(c * f) == pytest.approx(abs(c) * fourier_norm(f), rel=1e-12, abs=1e-300)


class TestPwInverse:
    def test_zero(self):
        g = HalfPlaneGrid.uniform(0.0, 10, t_max=1.0)
        assert pw_inverse(GridFunction(g, np.zeros(10)), 1j) == 0

    def test_example_grid(self):
        # dt = 0.05 on the literal grid gives about 3 % trapezoid error
        g = HalfPlaneGrid.uniform(0.0, 400, t_max=20.0)
        val = pw_inverse(g.sample(laplace_pair(0.0)[0]), 1j)
        assert abs(val - 1 / (16 * math.pi ** 2)) <= 0.05 / (16 * math.pi ** 2)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_laplace_oracle_fine_grid(self, alpha):
        f, F = laplace_pair(alpha)
        g = HalfPlaneGrid.uniform(alpha, 8000, t_max=4.0)
        z = np.array([1j, 0.3 + 0.5j, -2 + 1j])
        np.testing.assert_allclose(pw_inverse(g.sample(f), z), F(z), rtol=1e-5)

    def test_rejects_lower_half_plane(self):
        g = HalfPlaneGrid.uniform(0.0, 10, t_max=1.0)
        with pytest.raises(ValueError):
            pw_inverse(GridFunction(g, np.ones(10)), 1.0)

    @given(st.complex_numbers(max_magnitude=10, allow_nan=False),
           st.complex_numbers(max_magnitude=10, allow_nan=False), upper)
    def test_linear(self, a, b, z):
        g = HalfPlaneGrid.uniform(0.0, 60, t_max=3.0)
        f1 = g.sample(lambda t: t * np.exp(-t))
        f2 = g.sample(lambda t: np.sin(t) * np.exp(-2 * t))
        lhs = pw_inverse(a * f1 + b * f2, z)
        rhs = a * pw_inverse(f1, z) + b * pw_inverse(f2, z)
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))


class TestPwForward:
    def test_zero(self):
        g = HalfPlaneGrid.uniform(0.0, 100, t_max=1.5)
        out = pw_forward(lambda z: np.zeros_like(z), g)
        assert np.all(out.values == 0)

    @pytest.mark.parametrize("alpha", [0.0, 0.5])
    def test_laplace_oracle(self, alpha):
        f, F = laplace_pair(alpha)
        g = HalfPlaneGrid.uniform(alpha, 400, t_max=1.5)
        with warnings.catch_warnings():
            warnings.simplefilter("error", QuadratureTruncationWarning)
            out = pw_forward(F, g)
        ref = g.sample(f)
        assert fourier_norm(out - ref) <= 1e-4 * fourier_norm(ref)

    @pytest.mark.parametrize("alpha", [0.0, 1.0])
    def test_round_trip(self, alpha):
        g = HalfPlaneGrid.uniform(alpha, 400, t_max=1.5)
        f = g.sample(laplace_pair(alpha)[0])
        back = pw_forward(lambda z: pw_inverse(f, z), g, periodic=True)
        assert fourier_norm(back - f) <= 1e-4 * fourier_norm(f)

    def test_truncation_warning(self):
        # 1/(z+i) has x-decay far too slow for the window
        g = HalfPlaneGrid.uniform(0.0, 100, t_max=1.5)
        with pytest.warns(QuadratureTruncationWarning):
            pw_forward(lambda z: 1.0 / (z + 1j), g, x_extent=50)


class TestIsometry:
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_discrete_pair(self, alpha):
        g = HalfPlaneGrid.uniform(alpha, 400, t_max=1.5)
        f = g.sample(laplace_pair(alpha)[0])
        assert periodic_bergman_norm(f) == pytest.approx(fourier_norm(f), rel=1e-4)

    @pytest.mark.parametrize("alpha,b", [(0.0, 1.0), (0.5, 0.5), (1.0, 2.0)])
    def test_closed_form(self, alpha, b):
        _, F = laplace_pair(alpha, b)
        assert halfplane_norm(F, alpha, measure="fourier") == pytest.approx(
            exact_fourier_norm(alpha, b), rel=1e-4)


class TestCayley:
    def test_examples(self):
        assert cayley(1j) == 0
        assert inverse_cayley(0) == 1j
        assert cayley(1 + 1j) == pytest.approx((1 - 2j) / 5, abs=1e-15)

    def test_poles(self):
        with pytest.raises(ZeroDivisionError):
            cayley(-1j)
        with pytest.raises(ZeroDivisionError):
            inverse_cayley(1.0)

    def test_round_trip_on_disk(self):
        rng = np.random.default_rng(7)
        w = np.sqrt(rng.uniform(0, 0.99, 1000)) * np.exp(2j * np.pi * rng.uniform(size=1000))
        np.testing.assert_allclose(cayley(inverse_cayley(w)), w, atol=1e-13)

    @given(st.builds(complex, finite, st.floats(-5, 5).filter(lambda y: abs(y) > 1e-6)))
    def test_disk_iff_upper(self, z):
        assert (abs(cayley(z)) < 1) == (z.imag > 0)


class TestPhiMap:
    def test_examples(self):
        assert phi_map(lambda w: np.ones_like(w), 0.0, 1j) == pytest.approx(-0.5)
        assert phi_map(lambda w: w, 0.7, 1j) == 0

    @pytest.mark.parametrize("alpha,coefs", [(0.0, [1]), (0.0, [0, 0, 1]), (0.5, [1, 0.3j]),
                                             (1.0, [0.2, 0, 0, 1])])
    def test_norm_preserved(self, alpha, coefs):
        f = Poly(coefs)
        disk = disk_quadrature(alpha, 64, 64)
        disk_norm = math.sqrt(np.sum(disk.weights * np.abs(f(disk.nodes)) ** 2))
        half = halfplane_norm(lambda z: phi_map(f, alpha, z), alpha)
        assert half == pytest.approx(disk_norm, rel=1e-4)
        if coefs == [1] and alpha == 0:
            assert disk_norm == pytest.approx(math.sqrt(math.pi), rel=1e-10)


class TestKernel:
    def test_example(self):
        assert kernel_eval(1j, 1j, 0.0) == pytest.approx(-0.25)

    @given(upper, upper, st.sampled_from([0.0, 2.0]))
    def test_hermitian_even_integer_alpha(self, w, z, alpha):
        assert kernel_eval(w, z, alpha) == pytest.approx(np.conj(kernel_eval(z, w, alpha)),
                                                         rel=1e-12)

    @given(upper, upper, st.floats(-0.9, 3))
    def test_hermitian_up_to_phase(self, w, z, alpha):
        # conj(z) - w = -conj(conj(w) - z), and (-u)^s = e^{i pi s} u^s for Im u < 0,
        # so the bare kernel is Hermitian only up to the phase e^{-i pi alpha};
        # the reproducing kernel c_alpha k_w(z) is Hermitian
        k = kernel_eval(w, z, alpha)
        k_swap = np.conj(kernel_eval(z, w, alpha))
        assert k_swap == pytest.approx(np.exp(-1j * np.pi * alpha) * k, rel=1e-10)
        c = reproducing_constant_closed_form(alpha)
        assert c * k == pytest.approx(np.conj(c * kernel_eval(z, w, alpha)), rel=1e-10)

    @given(upper, upper, st.floats(-0.9, 3))
    def test_modulus(self, w, z, alpha):
        k = kernel_eval(w, z, alpha)
        assert abs(k) == pytest.approx(abs(np.conj(w) - z) ** (-(alpha + 2)), rel=1e-12)
        assert k != 0


class TestReproduce:
    def test_example(self):
        f = lambda z: (z + 1j) ** -2.0
        assert reproduce(f, 2j, 0.0) == pytest.approx(-1 / 9, abs=1e-4)

    def test_zero_and_linear(self):
        f = lambda z: (z + 1j) ** -2.5
        g = lambda z: kernel_eval(0.5 + 1j, z, 0.5)
        assert reproduce(lambda z: 0 * z, 1j, 0.5) == 0
        lhs = reproduce(lambda z: 2 * f(z) - 3j * g(z), 1.5j, 0.5)
        rhs = 2 * reproduce(f, 1.5j, 0.5) - 3j * reproduce(g, 1.5j, 0.5)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_calibrated_constant_matches_closed_form(self, alpha):
        assert reproducing_constant(alpha) == pytest.approx(
            reproducing_constant_closed_form(alpha), rel=1e-8)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_constant_consistent_across_test_functions(self, alpha):
        # solve for the constant from three different test functions
        rule = halfplane_quadrature(alpha)
        tests = [(lambda z: (z + 1j) ** -(alpha + 2), 2j),
                 (lambda z: kernel_eval(0.4 + 1.5j, z, alpha), 0.7 + 1.0j),
                 (lambda z: (z + 2j) ** -(alpha + 3), -0.5 + 0.8j)]
        consts = [f(z0) / _reproduce_integral(f, z0, alpha, rule) for f, z0 in tests]
        for c in consts:
            assert c == pytest.approx(consts[0], rel=1e-8)
        # |c| pi (alpha+1)^-1 = 2^alpha
        assert abs(consts[0]) * math.pi / (alpha + 1) == pytest.approx(2 ** alpha, rel=1e-8)

    @pytest.mark.parametrize("alpha", [0.0, 1.0])
    def test_kernel_functions_at_random_points(self, alpha):
        rng = np.random.default_rng(11)
        z0s = rng.uniform(-2, 2, 20) + 1j * rng.uniform(0.5, 5, 20)
        for z0 in z0s:
            w = complex(rng.uniform(-1, 1), rng.uniform(0.5, 2))
            f = lambda z, w=w: kernel_eval(w, z, alpha)
            assert reproduce(f, z0, alpha) == pytest.approx(f(z0), rel=1e-4)

    def test_rejects_lower_point(self):
        with pytest.raises(ValueError):
            reproduce(lambda z: z, -1j, 0.0)
