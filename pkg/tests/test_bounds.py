import math
from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from bounds import (
    BoundReport,
    ExpansionReport,
    ShiftSequence,
    check_weight_sign,
    family_gamma,
    gamma_density,
    gamma_k,
    houdre_kagan_gaussian,
    klaassen_bounds,
    klaassen_lower,
    klaassen_upper,
    matrix_cs_residual,
    olkin_shepp,
    oracle_variance,
    rising_factorial,
    variance_expansion,
)
from distribution import BinomialFamily, LaplaceFamily, NormalFamily, make_builtin
from numerics import InvalidParameter, MissingDerivative, MonteCarloConfig, SignViolation, UnsupportedOrder
from stein_ops import constant, exponential, identity, polynomial, power, smoothed_indicator


class TestShiftSequence:
    def test_patterns(self):
        assert ShiftSequence.parse("+-").ells == [1, -1]
        assert ShiftSequence.parse("1,-1,1").ells == [1, -1, 1]
        assert ShiftSequence.parse("0").ells == [0]
        assert ShiftSequence.parse("-1").ells == [-1]

    def test_mixed_sequence_rejected(self):
        with pytest.raises(PydanticValidationError):
            ShiftSequence(ells=[0, 1])

    def test_extension_and_counts(self):
        seq = ShiftSequence.parse("+-").extended(4)
        assert seq.ells == [1, -1, -1, -1]
        assert ShiftSequence.plus_count(seq.ells) == 1
        assert ShiftSequence.minus_offset(seq.ells) == -3
        assert seq.label() == "+---"


class TestGamma:
    def test_rising_factorial(self):
        assert rising_factorial(3, 0) == 1
        assert rising_factorial(3, 2) == 12

    def test_normal_closed_form(self):
        dist = make_builtin(NormalFamily(mu=0.0, sigma2=2.0))
        assert gamma_k(dist, [0, 0], 2)(0.7) == pytest.approx(2.0)

    @pytest.mark.parametrize("name", ["beta", "gamma"])
    def test_pearson_closed_form_matches_lemma(self, name, request):
        dist = request.getfixturevalue(name)
        closed = gamma_density(dist, [0, 0], 2, method="family")
        lemma = gamma_density(dist, [0, 0], 2, method="lemma")
        for x in dist.grid(7):
            assert lemma(x) == pytest.approx(closed(x), rel=1e-6, abs=1e-10)

    @pytest.mark.parametrize("ells", [[-1, -1], [-1, 1], [1, -1], [1, 1]])
    def test_ord_closed_form_matches_lemma(self, poisson, ells):
        closed = gamma_density(poisson, ells, 2, method="family")
        lemma = gamma_density(poisson, ells, 2, method="lemma")
        for k in range(10):
            assert lemma(k) == pytest.approx(closed(k), rel=1e-9, abs=1e-15)

    @pytest.mark.parametrize("ells", [[-1, -1], [-1, 1], [1, -1], [1, 1]])
    def test_binomial_lemma_and_nested_forms_are_exact(self, binomial, exact_cfg, ells):
        closed = gamma_density(binomial, ells, 2, exact_cfg, method="family")
        lemma = gamma_density(binomial, ells, 2, exact_cfg, method="lemma")
        nested = gamma_density(binomial, ells, 2, exact_cfg, method="nested")
        for k in range(11):
            assert lemma(k) == closed(k)
            assert nested(k) == closed(k)

    def test_poisson_first_order(self, poisson):
        assert gamma_k(poisson, [-1], 1)(4) == pytest.approx(3.0)
        assert gamma_k(poisson, [1], 1)(4) == pytest.approx(4.0)

    def test_nested_quadrature_on_normal(self, normal):
        nested = gamma_density(normal, [0, 0], 2, method="nested")
        assert nested(0.3) / normal.pdf(0.3) == pytest.approx(0.5, rel=1e-5)

    def test_laplace_has_no_closed_form(self, laplace):
        assert family_gamma(laplace, [0], 1) is None
        with pytest.raises(InvalidParameter):
            gamma_density(laplace, [0], 1, method="family")
        assert gamma_k(laplace, [0], 1)(1.5) == pytest.approx(2.5, rel=1e-7)
        assert gamma_k(laplace, [0, 0], 2)(1.5) == pytest.approx(0.5 * 1.5 ** 2 + 1.5 + 1.0, rel=1e-6)

    def test_support_exhausted(self):
        dist = make_builtin(BinomialFamily(n=2, p=0.5))
        with pytest.raises(UnsupportedOrder):
            gamma_density(dist, [1, 1, 1], 3)

    def test_nested_order_cap(self, normal):
        with pytest.raises(UnsupportedOrder):
            gamma_density(normal, [0] * 4, 4, method="nested")

    def test_unknown_method(self, normal):
        with pytest.raises(InvalidParameter):
            gamma_density(normal, [0], 1, method="spline")


class TestKlaassen:
    @pytest.mark.parametrize("ell", [-1, 1])
    def test_poisson_identity_is_an_equality(self, poisson, ell):
        report = klaassen_bounds(poisson, ell, identity())
        assert report.lower == pytest.approx(3.0, rel=1e-10)
        assert report.upper == pytest.approx(3.0, rel=1e-10)
        assert report.equality
        assert report.errors == []

    def test_normal_identity(self, normal):
        report = klaassen_bounds(normal, 0, identity())
        assert report.lower == pytest.approx(1.0)
        assert report.upper == pytest.approx(1.0)
        assert report.equality

    @pytest.mark.parametrize("f", [power(2), exponential(-1.0), smoothed_indicator(3.0)], ids=["x^2", "exp", "smooth"])
    def test_gamma_sandwich(self, gamma, f):
        report = klaassen_bounds(gamma, 0, f)
        assert report.lower_ok and report.upper_ok
        assert report.lower <= report.oracle_variance + 1e-9
        assert report.upper >= report.oracle_variance - 1e-9

    def test_binomial_lower_closed_form(self, binomial, exact_cfg):
        # (1 − p) E[X Δ⁻f]² / (n p) with f = x², E[X(2X − 1)] = 50
        lower = klaassen_lower(binomial, 1, power(2), cfg=exact_cfg)
        assert lower == Fraction(250)

    def test_beta_lower_closed_form(self, beta):
        f = power(2)
        weighted = beta.expect(lambda x: x * (1 - x) * 2 * x).value
        expected = (2.0 + 3.0 + 1.0) / (2.0 * 3.0) * weighted ** 2
        assert klaassen_lower(beta, 0, f) == pytest.approx(expected, rel=1e-8)

    def test_poisson_lower_with_backward_shift(self, poisson):
        f = exponential(-1.0)
        expected = 3.0 * poisson.expect(lambda k: f(k + 1) - f(k)).value ** 2
        assert klaassen_lower(poisson, -1, f) == pytest.approx(expected, rel=1e-10)

    def test_upper_with_monotone_standardizer(self, poisson):
        variance = oracle_variance(poisson, power(2))
        assert klaassen_upper(poisson, -1, power(2), h=power(2)) >= variance - 1e-9

    def test_standardizer_branch_follows_identity_flag(self, poisson):
        # a relabelled x² must not take the Γ₁ shortcut reserved for the identity
        plain = klaassen_upper(poisson, 1, power(3), h=power(2))
        relabelled = klaassen_upper(poisson, 1, power(3), h=power(2).renamed("id"))
        assert relabelled == pytest.approx(plain, rel=1e-12)
        assert not power(2).renamed("id").is_identity

    def test_identity_shortcut_matches_general_weight(self, poisson):
        general = klaassen_upper(poisson, -1, power(2), h=polynomial([0, 1]))
        assert general == pytest.approx(klaassen_upper(poisson, -1, power(2), h=identity()), rel=1e-9)

    def test_custom_c(self, normal):
        # c = 1: T c = −x, so the bound is E[f']²
        assert klaassen_lower(normal, 0, power(2), c=constant(1)) == pytest.approx(0.0, abs=1e-12)
        assert klaassen_lower(normal, 0, exponential(-1.0), c=constant(1)) == pytest.approx(math.e, rel=1e-8)

    def test_degenerate_c_is_reported(self, normal):
        report = klaassen_bounds(normal, 0, power(2), c=constant(0))
        assert report.lower is None
        assert report.lower_ok
        assert report.errors[0]['error_type'] == "DegenerateDenominator"
        assert report.upper == pytest.approx(4.0)

    def test_negative_weight(self, normal):
        with pytest.raises(SignViolation):
            check_weight_sign(normal, lambda x: -1.0, "negative")

    def test_report_round_trip(self, poisson):
        report = klaassen_bounds(poisson, -1, identity())
        assert BoundReport.model_validate_json(report.model_dump_json()) == report


class TestExpansion:
    def test_gaussian_quartic(self, normal):
        report = variance_expansion(normal, power(4), 4)
        assert report.terms == pytest.approx([240.0, -216.0, 96.0, -24.0], rel=1e-9)
        assert report.partial_sums == pytest.approx([240.0, 24.0, 120.0, 96.0], rel=1e-9)
        assert report.oracle_variance == pytest.approx(96.0, rel=1e-9)
        assert report.sandwich_flags == ["upper", "lower", "upper", "lower"]
        assert all(report.sandwich_ok)

    @pytest.mark.parametrize("name", ["normal", "gamma", "beta"])
    @pytest.mark.parametrize("degree", [1, 2, 3, 4])
    def test_polynomial_expansion_is_exact(self, name, degree, request):
        dist = request.getfixturevalue(name)
        g = polynomial([1, -2, 1, 1, 1][:degree + 1])
        report = variance_expansion(dist, g, degree)
        assert report.partial_sums[-1] == pytest.approx(float(oracle_variance(dist, g)), rel=1e-8, abs=1e-8)

    @pytest.mark.parametrize("pattern", ["--", "-+", "+-", "++"])
    def test_poisson_patterns(self, poisson, pattern):
        report = variance_expansion(poisson, power(2), 2, ShiftSequence.parse(pattern))
        assert all(report.sandwich_ok)
        assert report.ells == ShiftSequence.parse(pattern).ells

    def test_binomial_exact(self, binomial, exact_cfg):
        report = variance_expansion(binomial, exponential(-1.0), 3, [1, -1, 1], exact_cfg)
        assert all(report.sandwich_ok)
        assert report.truncated_at is None

    def test_truncation_when_support_is_exhausted(self):
        dist = make_builtin(BinomialFamily(n=3, p=0.5))
        report = variance_expansion(dist, power(2), 5, [1])
        assert report.truncated_at == 4
        assert len(report.terms) == 3
        assert report.errors[0]['error_type'] == "UnsupportedOrder"

    def test_order_must_be_positive(self, normal):
        with pytest.raises(InvalidParameter):
            variance_expansion(normal, power(2), 0)

    def test_generic_standardizer(self, normal):
        h = polynomial([0, 1, 0, 1])
        report = variance_expansion(normal, power(2), 2, standardizers=[h])
        assert all(report.sandwich_ok)

    def test_monte_carlo_remainder(self, normal):
        mc = MonteCarloConfig(seed=11, samples=20_000)
        report = variance_expansion(normal, power(2), 1, monte_carlo=mc)
        exact_remainder = report.partial_sums[0] - report.oracle_variance
        assert exact_remainder == pytest.approx(2.0, rel=1e-8)
        assert abs(report.mc_remainder - exact_remainder) <= 6.0 * report.mc_stderr + 0.02

    def test_report_round_trip(self, normal):
        report = variance_expansion(normal, power(3), 2)
        assert ExpansionReport.model_validate_json(report.model_dump_json()) == report


class TestGaussianExpansion:
    def test_first_bracket(self):
        report = houdre_kagan_gaussian(power(4), 1.0, 1)
        assert report.brackets == pytest.approx([24.0, 120.0])
        assert report.method == "houdre-kagan"
        assert report.brackets[0] <= report.oracle_variance <= report.brackets[1]

    def test_second_bracket(self):
        report = houdre_kagan_gaussian(power(4), 1.0, 2)
        assert report.brackets == pytest.approx([96.0, 96.0])

    def test_scaled_variance(self):
        report = houdre_kagan_gaussian(power(2), 2.0, 1)
        # Var[X²] = 2σ⁴ = 8
        assert report.oracle_variance == pytest.approx(8.0)
        assert report.brackets == pytest.approx([8.0, 8.0])

    def test_needs_analytic_derivatives(self):
        with pytest.raises(MissingDerivative):
            houdre_kagan_gaussian(smoothed_indicator(0.0), 1.0, 1)


class TestMatrixBounds:
    def test_olkin_shepp_on_normal(self, normal):
        report = olkin_shepp(normal, 0, identity(), power(2))
        assert np.array(report.lhs) == pytest.approx(np.array([[1.0, 0.0], [0.0, 2.0]]), abs=1e-9)
        assert np.array(report.rhs) == pytest.approx(np.diag([1.0, 4.0]), abs=1e-9)
        assert report.scalar_slacks == pytest.approx([0.0, 2.0], abs=1e-9)
        assert report.psd_ok and report.det_ok

    @pytest.mark.parametrize("ell", [-1, 1])
    def test_olkin_shepp_on_poisson(self, poisson, ell):
        report = olkin_shepp(poisson, ell, polynomial([1, -2, 1]), exponential(-1.0))
        assert report.psd_ok and report.det_ok

    def test_olkin_shepp_on_laplace(self):
        dist = make_builtin(LaplaceFamily())
        report = olkin_shepp(dist, 0, identity(), power(3))
        assert report.psd_ok and report.det_ok

    def test_cauchy_schwarz_on_normal(self, normal):
        report = matrix_cs_residual(normal, 0, identity(), power(2), exponential(-1.0), -1.0, 1.5)
        assert report.holds
        assert report.residual_min_eigenvalue >= -1e-10

    def test_cauchy_schwarz_is_exact_on_lattice(self, binomial, exact_cfg):
        report = matrix_cs_residual(binomial, 1, identity(), power(2), polynomial([1, 1]), 1, 8, exact_cfg)
        assert report.identity_error == 0.0
        assert report.holds

    def test_cauchy_schwarz_empty_interval(self, binomial):
        report = matrix_cs_residual(binomial, 1, identity(), power(2), identity(), 6, 6)
        assert report.holds
        assert report.lhs == [[0.0, 0.0], [0.0, 0.0]]
