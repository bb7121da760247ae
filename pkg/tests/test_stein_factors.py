import math
from fractions import Fraction

import pytest
from scipy import stats

from numerics import InvalidParameter, ZeroDensity
from stein_factors import (
    factor_profile,
    factor_R,
    inverse_bound_check,
    lipschitz_domination,
    lipschitz_solution_bound,
    mills_bounds_gaussian,
    monotone_direction,
    sign_constancy_check,
    sup_norm,
)
from stein_ops import clipped, constant, exponential, identity, indicator_le, power, sine

R_AT_ZERO = 0.25 * math.sqrt(2 * math.pi)


class TestFactor:
    def test_gaussian_peak(self, normal):
        assert factor_R(normal, 0, 0.0) == pytest.approx(R_AT_ZERO, rel=1e-10)

    def test_binomial_forward_shift(self, binomial20):
        ref = stats.binom(20, 0.2)
        expected = ref.cdf(3) * ref.sf(3) / ref.pmf(4)
        assert factor_R(binomial20, 1, 4) == pytest.approx(expected, rel=1e-10)

    def test_binomial_is_exact(self, binomial, exact_cfg):
        value = factor_R(binomial, -1, 5, exact_cfg)
        assert isinstance(value, Fraction)
        assert value == binomial.cdf_at(5, True) * (1 - binomial.cdf_at(5, True)) / binomial.pdf(5, True)

    def test_poisson_tail(self, poisson):
        ref = stats.poisson(3.0)
        expected = ref.cdf(15) * ref.sf(15) / ref.pmf(15)
        assert factor_R(poisson, -1, 15) == pytest.approx(expected, rel=1e-8)

    def test_gaussian_far_tail_matches_mills(self, normal):
        assert factor_R(normal, 0, 30.0) == pytest.approx(mills_bounds_gaussian(30.0).R, rel=1e-8)

    def test_needs_positive_density(self, beta):
        with pytest.raises(ZeroDensity):
            factor_R(beta, 0, 0.0)

    def test_profile(self, normal):
        profile = factor_profile(normal, 0, [-2.0, -1.0, 0.0, 1.0, 2.0])
        assert profile.argmax == 0.0
        assert profile.sup_on_grid == pytest.approx(R_AT_ZERO)
        assert profile.values[0] == pytest.approx(profile.values[-1])
        assert profile.to_dict()['grid'] == [-2.0, -1.0, 0.0, 1.0, 2.0]

    def test_profile_outside_support(self, beta):
        with pytest.raises(InvalidParameter):
            factor_profile(beta, 0, [-1.0, 2.0])


class TestInverseBounds:
    def test_sup_norm(self, binomial, beta):
        assert sup_norm(binomial, sine()) == 1.0
        assert sup_norm(binomial, power(2)) == 100.0
        assert sup_norm(beta, exponential(-1.0)) == pytest.approx(1.0)

    @pytest.mark.parametrize("x", [-2.0, 0.0, 0.5, 3.0])
    def test_gaussian_sine(self, normal, x):
        check = inverse_bound_check(normal, 0, sine(), x)
        assert check.holds
        assert check.sup_norm == 1.0

    @pytest.mark.parametrize("ell", [-1, 1])
    def test_binomial_indicator(self, binomial, exact_cfg, ell):
        for x in range(11):
            assert inverse_bound_check(binomial, ell, indicator_le(4), x, exact_cfg).holds

    def test_lipschitz_solution(self, normal):
        for x in (-1.0, 0.3, 2.5):
            check = lipschitz_solution_bound(normal, 0, clipped(1.0), identity(), 1.0, x)
            assert check.bound_ok
            assert check.domination_ok

    def test_domination_failure(self, normal):
        assert not lipschitz_domination(normal, power(2), identity(), 1.0, seed=3)


class TestMills:
    def test_at_zero(self):
        bounds = mills_bounds_gaussian(0.0)
        assert bounds.lower1 == pytest.approx(0.5)
        assert bounds.half_r == pytest.approx(0.6267, abs=1e-4)
        assert bounds.R == pytest.approx(0.6267, abs=1e-4)
        assert bounds.r == pytest.approx(1.2533, abs=1e-4)
        assert bounds.upper == pytest.approx(math.sqrt(2.0))
        assert bounds.holds

    @pytest.mark.parametrize("x", [0.5, 1.0, 3.0, 10.0, 40.0])
    def test_chain(self, x):
        bounds = mills_bounds_gaussian(x)
        assert bounds.holds
        assert bounds.lower1 <= bounds.half_r <= bounds.R <= bounds.r <= bounds.upper * (1 + 1e-12)

    def test_negative_argument(self):
        with pytest.raises(InvalidParameter):
            mills_bounds_gaussian(-0.1)


class TestMonotonicity:
    def test_directions(self, normal):
        assert monotone_direction(identity(), normal) == 1
        assert monotone_direction(exponential(-1.0), normal) == -1
        assert monotone_direction(constant(2), normal) == 0
        assert monotone_direction(sine(), normal) is None

    def test_lattice_directions(self, poisson):
        assert monotone_direction(power(2), poisson) == 1

    def test_sign_constancy(self, normal, poisson):
        assert sign_constancy_check(normal, 0, identity())
        assert not sign_constancy_check(normal, 0, power(2))
        assert sign_constancy_check(poisson, -1, indicator_le(2))
