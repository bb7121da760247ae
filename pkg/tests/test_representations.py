import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import ndtr

from numerics import InvalidParameter, ZeroDensity, is_psd
from representations import (
    cov_via_inverse,
    cov_via_kernel,
    direct_covariance,
    increment_representation,
    inverse_via_double,
    inverse_via_kernel,
    kernel_K,
    kernel_matrix,
    kernel_over_density,
    lagrange_residual,
    natural_gradient_identity,
    phi_interval,
    phi_weight,
    phi_weight4,
    variance_pair_identity,
)
from stein_ops import exponential, identity, power, pseudo_inverse, sine, smoothed_indicator


class TestKernel:
    def test_normal_closed_form(self, normal):
        assert kernel_K(normal, 0, -0.3, 1.2) == pytest.approx(ndtr(-0.3) * ndtr(-1.2))

    def test_symmetry(self, gamma):
        assert kernel_K(gamma, 0, 1.0, 4.0) == kernel_K(gamma, 0, 4.0, 1.0)

    def test_lattice_shift_conventions(self, binomial, exact_cfg):
        # ℓ = +1 counts X ≤ x − 1 on the left, ℓ = −1 counts X ≤ x
        assert kernel_K(binomial, 1, 3, 6, exact_cfg) == binomial.cdf_at(2, True) * (1 - binomial.cdf_at(5, True))
        assert kernel_K(binomial, -1, 3, 6, exact_cfg) == binomial.cdf_at(3, True) * (1 - binomial.cdf_at(6, True))

    @pytest.mark.parametrize("name,ell", [("normal", 0), ("laplace", 0), ("poisson", -1), ("poisson", 1)])
    def test_gram_matrix_is_psd(self, name, ell, request):
        dist = request.getfixturevalue(name)
        xs = [int(x) for x in dist.grid(10)] if dist.is_lattice else list(dist.grid(10))
        assert is_psd(kernel_matrix(dist, ell, xs), tol=1e-10)

    def test_profile_needs_positive_density(self, beta):
        with pytest.raises(ZeroDensity):
            kernel_over_density(beta, 0, 0.0, 0.5)

    def test_profile_peak_is_the_stein_factor(self, normal):
        assert kernel_over_density(normal, 0, 0.0, 0.0) == pytest.approx(0.25 * math.sqrt(2 * math.pi))


class TestPhi:
    def test_interval_for_each_shift(self, binomial):
        assert list(phi_interval(binomial, 1, 2, 5).points()) == [3, 4, 5]
        assert list(phi_interval(binomial, -1, 2, 5).points()) == [2, 3, 4]
        assert phi_interval(binomial, 1, 5, 5) is None

    def test_weight(self, binomial, exact_cfg):
        assert phi_weight(binomial, 1, 2, 4, 5, exact_cfg) == 1 / binomial.pdf(4, True)
        assert phi_weight(binomial, 1, 4, 4, 5, exact_cfg) == 0

    def test_weight_on_interval(self, normal):
        assert phi_weight(normal, 0, 0.0, 0.5, 1.0) == pytest.approx(1.0 / normal.pdf(0.5))
        assert phi_weight(normal, 0, 0.5, 0.5, 0.5) == 0
        assert phi_weight4(normal, 0, 0.5, 0.5, 0.5, 0.5) == 0

    def test_four_point_weight(self, binomial, exact_cfg):
        expected = 1 / (binomial.pdf(3, True) * binomial.pdf(5, True))
        assert phi_weight4(binomial, 1, 1, 3, 5, 7, exact_cfg) == expected
        assert phi_weight4(binomial, 1, 1, 4, 4, 7, exact_cfg) == 0
        assert phi_weight4(binomial, -1, 1, 4, 4, 7, exact_cfg) == 0


class TestInverseRepresentations:
    @pytest.mark.parametrize("h", [power(2), smoothed_indicator(0.0), sine()], ids=["x^2", "smooth", "sin"])
    def test_normal(self, normal, h):
        inverse = pseudo_inverse(normal, 0, h)
        for x in (-1.5, 0.2, 2.0):
            assert -inverse_via_kernel(normal, 0, h, x) == pytest.approx(inverse(x), abs=1e-7)
            assert -inverse_via_double(normal, 0, h, x) == pytest.approx(inverse(x), abs=1e-7)

    def test_beta(self, beta):
        h = exponential(-1.0)
        inverse = pseudo_inverse(beta, 0, h)
        for x in (0.1, 0.5, 0.9):
            assert -inverse_via_kernel(beta, 0, h, x) == pytest.approx(inverse(x), abs=1e-8)
            assert -inverse_via_double(beta, 0, h, x) == pytest.approx(inverse(x), abs=1e-8)

    @pytest.mark.parametrize("ell", [-1, 1])
    def test_binomial_is_exact(self, binomial, exact_cfg, ell):
        h = power(2)
        inverse = pseudo_inverse(binomial, ell, h, exact_cfg)
        for x in range(11):
            expected = inverse(x)
            assert isinstance(expected, Fraction)
            assert -inverse_via_kernel(binomial, ell, h, x, exact_cfg) == expected
            assert -inverse_via_double(binomial, ell, h, x, exact_cfg) == expected

    def test_poisson(self, poisson):
        h = power(2)
        for ell in (-1, 1):
            inverse = pseudo_inverse(poisson, ell, h)
            for x in (0, 3, 9):
                assert -inverse_via_kernel(poisson, ell, h, x) == pytest.approx(inverse(x), rel=1e-9, abs=1e-9)
                assert -inverse_via_double(poisson, ell, h, x) == pytest.approx(inverse(x), rel=1e-9, abs=1e-9)


class TestCovariance:
    @pytest.mark.parametrize("ell", [-1, 1])
    def test_poisson_third_moment(self, poisson, ell):
        # Cov[X, X²] = E X³ − λ E X² = 57 − 36
        assert direct_covariance(poisson, identity(), power(2)) == pytest.approx(21.0, rel=1e-10)
        assert cov_via_inverse(poisson, ell, identity(), power(2)) == pytest.approx(21.0, rel=1e-10)
        assert cov_via_kernel(poisson, ell, identity(), power(2)) == pytest.approx(21.0, rel=1e-10)

    def test_normal(self, normal):
        expected = -math.exp(0.5)
        assert direct_covariance(normal, identity(), exponential(-1.0)) == pytest.approx(expected, rel=1e-8)
        assert cov_via_inverse(normal, 0, identity(), exponential(-1.0)) == pytest.approx(expected, rel=1e-7)
        assert cov_via_kernel(normal, 0, identity(), exponential(-1.0)) == pytest.approx(expected, rel=1e-6)

    def test_binomial_exact(self, binomial, exact_cfg):
        direct = direct_covariance(binomial, power(2), exponential(-1.0), exact_cfg)
        for ell in (-1, 1):
            assert cov_via_inverse(binomial, ell, power(2), exponential(-1.0), exact_cfg) == pytest.approx(direct)
            assert cov_via_kernel(binomial, ell, power(2), exponential(-1.0), exact_cfg) == pytest.approx(direct)

    def test_variance_pair_identity(self, normal, binomial, exact_cfg):
        assert variance_pair_identity(normal, power(2)) == pytest.approx(2.0, rel=1e-7)
        assert variance_pair_identity(binomial, identity(), exact_cfg) == Fraction(5, 2)


class TestIncrementsAndLagrange:
    def test_increment_on_normal(self, normal):
        check = increment_representation(normal, 0, sine(), -0.5, 1.2)
        assert check.holds
        assert check.lhs == pytest.approx(math.sin(1.2) - math.sin(-0.5))

    @pytest.mark.parametrize("ell", [-1, 1])
    def test_increment_on_binomial(self, binomial, exact_cfg, ell):
        check = increment_representation(binomial, ell, power(2), 2, 7, exact_cfg)
        assert check.residual == 0.0
        assert check.holds

    def test_lagrange_on_normal(self, normal):
        report = lagrange_residual(normal, 0, identity(), exponential(-1.0), -1.0, 2.0)
        assert report.holds
        assert report.remainder > 0

    def test_lagrange_on_poisson(self, poisson):
        report = lagrange_residual(poisson, 1, identity(), power(2), 0, 6)
        assert report.holds

    def test_lagrange_empty_interval(self, poisson):
        report = lagrange_residual(poisson, 1, identity(), power(2), 4, 4)
        assert report.residual == 0.0


class TestNaturalGradient:
    def test_binomial(self, binomial, exact_cfg):
        check = natural_gradient_identity(binomial, power(3), exact_cfg)
        assert check.holds
        assert check.residual == 0.0
        assert check.extra['backward_form'] == check.lhs
        assert check.extra['forward_form'] == check.lhs

    def test_poisson(self, poisson):
        check = natural_gradient_identity(poisson, exponential(-1.0))
        assert check.holds
        assert check.extra['backward_form'] == pytest.approx(float(check.lhs), rel=1e-10)

    def test_only_lattice_families(self, normal):
        with pytest.raises(InvalidParameter):
            natural_gradient_identity(normal, power(2))


def test_kernel_profile_tails_are_finite(normal):
    values = [kernel_over_density(normal, 0, 6.0, x) for x in np.linspace(-6.0, 6.0, 7)]
    assert all(math.isfinite(v) and v >= 0 for v in values)
