import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate
from scipy.special import kv

from trapscatter import (
    ConvergenceError,
    QuadSpec,
    diffraction_z_integral,
    p_kernel,
    polylog3,
    sqrt_singular_integral,
)


class TestPolylog3:
    def test_endpoints(self):
        assert polylog3(0.0) == 0.0
        assert_allclose(polylog3(1.0), 1.2020569031595943, rtol=1e-15)

    def test_half_against_series(self):
        # direct partial sum of x^k/k^3, converged far past double precision
        k = np.arange(1, 2000)
        reference = float(np.sum(0.5**k / k**3))
        assert_allclose(polylog3(0.5), reference, rtol=1e-13)
        assert_allclose(polylog3(0.5), 0.5372131936080401, rtol=1e-12)

    @pytest.mark.parametrize("x", [1e-4, 0.05, 0.3, 0.5, 0.500001, 0.7, 0.9, 0.99, 0.999])
    def test_against_mpmath(self, x):
        assert_allclose(polylog3(x), float(mpmath.polylog(3, x)), rtol=5e-14)

    @pytest.mark.parametrize("x", [-0.1, 1.1, 2.0])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            polylog3(x)


def _p_reference(a, b):
    def integrand(z):
        if z + max(a, b) > 600.0:
            return 0.0
        return z / (math.expm1(z + a) * math.expm1(z + b))

    v1, _ = integrate.quad(integrand, 0, 1, limit=300, epsabs=1e-14, epsrel=1e-12)
    v2, _ = integrate.quad(integrand, 1, np.inf, limit=300, epsabs=1e-14, epsrel=1e-12)
    return v1 + v2


class TestPKernel:
    def test_symmetry(self):
        assert p_kernel(0.3, 1.7) == p_kernel(1.7, 0.3)

    def test_large_argument_asymptote(self):
        # e^{-a-b} int z e^{-2z} dz = e^{-10}/4 at a = b = 5
        assert_allclose(p_kernel(5.0, 5.0), math.exp(-10.0) / 4.0, rtol=0.02)

    @pytest.mark.parametrize(
        "a,b", [(0.0, 1.0), (0.3, 1.7), (0.01, 0.01), (1e-5, 2.0), (3.0, 0.2), (1e-6, 1e-6)]
    )
    def test_against_adaptive_reference(self, a, b):
        assert_allclose(p_kernel(a, b), _p_reference(a, b), rtol=1e-9)

    def test_single_zero_argument_finite(self):
        value = p_kernel(0.0, 1.0)
        assert 0.0 < value < 1.0

    def test_divergent_input(self):
        with pytest.raises(ValueError):
            p_kernel(0.0, 0.0)
        with pytest.raises(ValueError):
            p_kernel(1e-15, 1e-16)

    def test_monotone_decreasing(self):
        grid = [0.01, 0.1, 0.5, 1.0, 3.0]
        for b in (0.2, 1.0):
            values = [p_kernel(a, b) for a in grid]
            assert all(x > y for x, y in zip(values, values[1:]))

    @pytest.mark.parametrize("a", [1e-6, 1e-5, 1e-4, 1e-3, 1e-2])
    def test_small_argument_log_growth(self, a):
        ratio = p_kernel(a, a) / math.log(1.0 / a)
        assert 0.5 <= ratio <= 2.0

    def test_deterministic(self):
        assert p_kernel(0.37, 1.21) == p_kernel(0.37, 1.21)


class TestDiffractionZIntegral:
    @pytest.mark.parametrize("delta,t", [(0.5, 2.0), (2.0, 10.0), (10.0, 50.0)])
    def test_unit_at_zero_mu(self, delta, t):
        assert_allclose(diffraction_z_integral(delta, 0.0, t), 1.0, atol=1e-12)

    @pytest.mark.parametrize(
        "delta,mu", [(2.0, -0.00216), (1.0, -0.5), (0.5, -2.0), (3.0, -1.0), (1.0, -50.0)]
    )
    def test_against_bessel_closed_form(self, delta, mu):
        # int_0^inf u e^{-u - beta/u} du = 2 beta K2(2 sqrt(beta)), and K2 is
        # the K0/K1 combination K2(x) = K0(x) + 2 K1(x)/x of argument
        # x = delta sqrt(-2 mu).
        beta = -delta * delta * mu / 2.0
        reference = 2.0 * beta * kv(2, 2.0 * math.sqrt(beta))
        assert_allclose(diffraction_z_integral(delta, mu, 10.0), reference, rtol=1e-11)

    def test_unit_bessel_argument(self):
        # delta sqrt(-2 mu) = 1 <=> beta = 1/4
        delta, mu = 1.0, -0.5
        assert math.isclose(delta * math.sqrt(-2 * mu), 1.0)
        reference = 0.5 * kv(2, 1.0)
        assert_allclose(diffraction_z_integral(delta, mu, 10.0), reference, rtol=1e-11)

    def test_strong_suppression(self):
        assert diffraction_z_integral(2.0, -5000.0, 10.0) < 1e-30

    def test_validation(self):
        with pytest.raises(ValueError):
            diffraction_z_integral(0.0, 0.0, 10.0)
        with pytest.raises(ValueError):
            diffraction_z_integral(1.0, 0.1, 10.0)


class TestSqrtSingularIntegral:
    def test_inverse_sqrt_endpoint(self):
        assert_allclose(sqrt_singular_integral(lambda y: y**-0.5, 0.0, 1.0), 2.0, rtol=1e-10)

    def test_beta_function_identity(self):
        value = sqrt_singular_integral(lambda y: (y * (1.0 - y)) ** -0.5, 0.0, 1.0)
        assert_allclose(value, math.pi, rtol=1e-10)

    def test_smooth_integrand(self):
        assert_allclose(sqrt_singular_integral(lambda y: y, 0.0, 1.0), 0.5, rtol=1e-12)

    def test_shifted_interval(self):
        value = sqrt_singular_integral(lambda y: (y - 2.0) ** -0.5, 2.0, 3.0)
        assert_allclose(value, 2.0, rtol=1e-10)

    def test_validation(self):
        with pytest.raises(ValueError):
            sqrt_singular_integral(lambda y: y, 1.0, 1.0)


class TestQuadSpec:
    def test_defaults(self):
        spec = QuadSpec()
        assert spec.rel_tol == 1e-8
        assert spec.abs_tol == 1e-12
        assert spec.max_subdivisions == 2000

    def test_validation(self):
        with pytest.raises(ValueError):
            QuadSpec(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadSpec(max_subdivisions=0)

    def test_budget_exhaustion(self):
        # a budget too small to allow even two quadrature resolutions
        with pytest.raises(ConvergenceError):
            p_kernel(0.5, 0.5, QuadSpec(rel_tol=1e-8, abs_tol=1e-12, max_subdivisions=1))
