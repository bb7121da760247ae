import json
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from distribution import (
    BinomialFamily,
    NormalFamily,
    PoissonFamily,
    SupportSpec,
    make_custom,
    make_custom_from_table,
    parse_distribution_spec,
    parse_inline_spec,
    support_grid,
    validate,
)
from numerics import InvalidParameter, MeasureKind, NotNormalized


class TestBuiltinMoments:
    def test_binomial(self, binomial20):
        assert binomial20.mean == pytest.approx(4.0)
        assert binomial20.variance == pytest.approx(3.2)

    def test_gamma(self, gamma):
        assert gamma.mean == pytest.approx(3.12)
        assert gamma.variance == pytest.approx(1.3 * 2.4 ** 2)

    def test_hypergeometric_matches_scipy(self, hypergeometric):
        assert hypergeometric.mean == pytest.approx(1.6)
        frozen = stats.hypergeom(M=50, n=10, N=8)
        for k in hypergeometric.lattice():
            assert hypergeometric.pdf(k) == pytest.approx(frozen.pmf(k), rel=1e-12)

    def test_poisson_truncation(self, poisson):
        cut = poisson.support.cut_upper
        assert cut is not None
        assert poisson.survival(cut) < 1e-14


class TestExactLattices:
    def test_binomial_masses_are_rational(self, binomial):
        total = sum(binomial.pdf(k, exact=True) for k in binomial.lattice())
        assert total == 1
        assert binomial.exact_mean == Fraction(5)
        assert binomial.pdf(3, exact=True) == Fraction(120, 1024)

    def test_hypergeometric_masses_sum_to_one(self, hypergeometric):
        assert sum(hypergeometric.pdf(k, exact=True) for k in hypergeometric.lattice()) == 1

    def test_shifted_masses(self, binomial):
        assert binomial.left_mass(1, 5, exact=True) == binomial.cdf_at(4, exact=True)
        assert binomial.left_mass(-1, 5, exact=True) == binomial.cdf_at(5, exact=True)
        assert binomial.upper_mass(1, 5, exact=True) == 1 - binomial.cdf_at(4, exact=True)


@pytest.mark.parametrize("name", ["normal", "beta", "gamma", "laplace", "binomial", "poisson", "hypergeometric"])
def test_builtin_targets_validate(name, request):
    dist = request.getfixturevalue(name)
    diagnostics = validate(dist)
    assert not diagnostics.not_normalized
    assert diagnostics.cdf_monotonicity_violations == 0
    assert diagnostics.mean_error < 1e-7
    assert diagnostics.cdf_accumulation_error < 1e-8
    assert diagnostics.support_consistent
    assert diagnostics.errors == []


def test_density_vanishes_outside_support(beta, binomial):
    assert beta.pdf(-0.5) == 0.0
    assert beta.pdf(1.5) == 0.0
    assert binomial.pdf(2.5) == 0.0
    assert binomial.pdf(11) == 0.0


def test_sampler_is_seeded(gamma):
    first = gamma.sample(10, np.random.default_rng(7))
    second = gamma.sample(10, np.random.default_rng(7))
    assert np.array_equal(first, second)


@pytest.mark.slow
def test_sampler_mean_within_five_standard_errors(gamma):
    ramp = make_custom(SupportSpec(0.0, 1.0), lambda x: 2.0 * x)
    for dist in (gamma, ramp):
        draws = dist.sample(1_000_000, np.random.default_rng(0))
        stderr = math.sqrt(dist.variance / len(draws))
        assert abs(draws.mean() - dist.mean) <= 5.0 * stderr
    assert ramp.mean == pytest.approx(2.0 / 3.0)


def test_support_grid_on_lattice(binomial):
    assert list(support_grid(binomial, 50)) == list(range(11))


class TestInlineSpecs:
    def test_named_parameter(self):
        fam = parse_inline_spec("poisson:lambda=3")
        assert isinstance(fam, PoissonFamily)
        assert fam.lam == 3

    def test_positional_parameters(self):
        fam = parse_inline_spec("normal:0,2")
        assert isinstance(fam, NormalFamily)
        assert fam.sigma2 == 2

    def test_greek_alias(self):
        assert parse_inline_spec("poisson:λ=2").lam == 2

    def test_binomial(self):
        fam = parse_inline_spec("binomial:10,0.3")
        assert isinstance(fam, BinomialFamily)
        assert (fam.n, fam.p) == (10, 0.3)

    def test_defaults(self):
        assert parse_inline_spec("normal").sigma2 == 1.0

    @pytest.mark.parametrize("text", ["cauchy:0,1", "beta:-1,2", "poisson:1,2", "binomial:0,0.5",
                                      "hypergeometric:10,12,3"])
    def test_invalid(self, text):
        with pytest.raises(InvalidParameter):
            parse_inline_spec(text)


class TestSpecParsing:
    def test_family_dict(self):
        dist = parse_distribution_spec({'family': 'gamma', 'params': {'alpha': 2, 'beta': 1}})
        assert dist.mean == pytest.approx(2.0)

    def test_custom_rational_table(self):
        dist = parse_distribution_spec({'custom': {
            'support': [0, 2],
            'measure': 'counting',
            'density_table': [[0, '1/4'], [1, '1/2'], [2, '1/4']],
        }})
        assert dist.supports_exact
        assert dist.exact_mean == 1
        assert dist.variance == pytest.approx(0.5)

    def test_json_file(self, tmp_path):
        path = tmp_path / "target.json"
        path.write_text(json.dumps({'family': 'binomial', 'params': {'n': 20, 'p': 0.2}}))
        dist = parse_distribution_spec(str(path))
        assert dist.name == "Binomial(20, 0.2)"

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidParameter):
            parse_distribution_spec(str(tmp_path / "absent.json"))

    def test_model_input(self):
        assert parse_distribution_spec(PoissonFamily(lam=2.0)).variance == 2.0

    def test_neither_family_nor_custom(self):
        with pytest.raises(InvalidParameter):
            parse_distribution_spec({'params': {}})


class TestCustomTargets:
    def test_uniform_density(self):
        dist = make_custom(SupportSpec(0.0, 1.0), lambda x: 1.0)
        assert dist.mean == pytest.approx(0.5)
        assert dist.variance == pytest.approx(1.0 / 12.0)
        assert dist.cdf_at(0.3) == pytest.approx(0.3, abs=1e-9)
        assert dist.cdf_at(-1.0) == 0.0

    def test_unnormalized_density_is_rejected(self):
        with pytest.raises(NotNormalized):
            make_custom(SupportSpec(0.0, 1.0), lambda x: 2.0)

    def test_unnormalized_density_is_reported(self):
        dist = make_custom(SupportSpec(0.0, 1.0), lambda x: 2.0, strict=False)
        assert validate(dist).not_normalized

    def test_piecewise_linear_table(self):
        dist = make_custom_from_table(SupportSpec(0.0, 2.0), [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)])
        assert dist.mean == pytest.approx(1.0)
        assert dist.pdf(0.5) == pytest.approx(0.5)

    def test_negative_mass(self):
        with pytest.raises(InvalidParameter):
            make_custom(SupportSpec(0, 1, MeasureKind.COUNTING), lambda k: 2 if k == 0 else -1)

    def test_infinite_lattice_needs_truncation(self):
        with pytest.raises(InvalidParameter):
            make_custom(SupportSpec(0, math.inf, MeasureKind.COUNTING), lambda k: 0.5 ** (k + 1))
