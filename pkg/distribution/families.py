import json
import logging
import math
import os
from fractions import Fraction
from math import comb
from typing import Annotated, Callable, Dict, List, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator
from pydantic import ValidationError as PydanticValidationError
from scipy import special, stats

from numerics import (
    DEFAULT_QUADRATURE,
    InvalidParameter,
    MeasureKind,
    QuadratureConfig,
    SupportSpec,
)

from .target import TargetDistribution, make_custom_from_table

logger = logging.getLogger(__name__)

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
EXACT_DENOMINATOR_LIMIT = 10 ** 9


class FamilyParams(BaseModel):
    """Common base of the builtin parameter models"""

    model_config = ConfigDict(frozen=True, populate_by_name=True)


class NormalFamily(FamilyParams):
    family: Literal["normal"] = "normal"
    mu: float = 0.0
    sigma2: float = Field(1.0, gt=0)


class BetaFamily(FamilyParams):
    family: Literal["beta"] = "beta"
    alpha: float = Field(gt=0)
    beta: float = Field(gt=0)


class GammaFamily(FamilyParams):
    """Gamma with shape alpha and scale beta (mean alpha*beta)"""

    family: Literal["gamma"] = "gamma"
    alpha: float = Field(gt=0)
    beta: float = Field(gt=0)


class LaplaceFamily(FamilyParams):
    family: Literal["laplace"] = "laplace"


class BinomialFamily(FamilyParams):
    family: Literal["binomial"] = "binomial"
    n: int = Field(ge=1)
    p: float = Field(gt=0, lt=1)

    @property
    def exact_p(self) -> Fraction:
        return Fraction(self.p).limit_denominator(EXACT_DENOMINATOR_LIMIT)


class PoissonFamily(FamilyParams):
    family: Literal["poisson"] = "poisson"
    lam: float = Field(gt=0, alias="lambda")


class HypergeometricFamily(FamilyParams):
    """Population N with K successes, n draws"""

    family: Literal["hypergeometric"] = "hypergeometric"
    N: int = Field(ge=2)
    K: int = Field(ge=1)
    n: int = Field(ge=1)

    @model_validator(mode="after")
    def check_ranges(self):
        if self.K >= self.N or self.n >= self.N:
            raise ValueError("need K < N and n < N")
        return self

    @property
    def bounds(self):
        return max(0, self.n + self.K - self.N), min(self.K, self.n)


BuiltinFamily = Annotated[
    Union[NormalFamily, BetaFamily, GammaFamily, LaplaceFamily, BinomialFamily, PoissonFamily, HypergeometricFamily],
    Field(discriminator="family"),
]
_FAMILY_ADAPTER = TypeAdapter(BuiltinFamily)

POSITIONAL_PARAMS: Dict[str, List[str]] = {
    'normal': ['mu', 'sigma2'],
    'beta': ['alpha', 'beta'],
    'gamma': ['alpha', 'beta'],
    'laplace': [],
    'binomial': ['n', 'p'],
    'poisson': ['lambda'],
    'hypergeometric': ['N', 'K', 'n'],
}
PARAM_ALIASES = {'λ': 'lambda', 'lam': 'lambda', 'σ2': 'sigma2', 'σ²': 'sigma2', 'μ': 'mu',
                 'α': 'alpha', 'β': 'beta'}


def family_from_params(name: str, params: Dict) -> BaseModel:
    """Validated family model; out-of-range parameters raise InvalidParameter"""
    key = name.strip().lower()
    if key not in POSITIONAL_PARAMS:
        raise InvalidParameter(f"unknown family '{name}'", known=", ".join(POSITIONAL_PARAMS))
    cleaned = {PARAM_ALIASES.get(k, k): v for k, v in params.items()}
    try:
        return _FAMILY_ADAPTER.validate_python({'family': key, **cleaned})
    except PydanticValidationError as exc:
        raise InvalidParameter(f"invalid parameters for {key}", detail=str(exc.errors()[0]['msg'])) from exc


def make_builtin(family: BaseModel, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> TargetDistribution:
    """Closed-form target for one of the builtin families"""
    builders: Dict[type, Callable] = {
        NormalFamily: _normal,
        BetaFamily: _beta,
        GammaFamily: _gamma,
        LaplaceFamily: _laplace,
        BinomialFamily: _binomial,
        PoissonFamily: _poisson,
        HypergeometricFamily: _hypergeometric,
    }
    builder = builders.get(type(family))
    if builder is None:
        raise InvalidParameter("not a builtin family", family=repr(family))
    dist = builder(family, cfg)
    logger.debug("built %s: mean %.6g, variance %.6g", dist.name, dist.mean, dist.variance)
    return dist


# Continuous families


def _normal(fam: NormalFamily, cfg: QuadratureConfig) -> TargetDistribution:
    mu, s2 = fam.mu, fam.sigma2
    sigma = math.sqrt(s2)

    def log_density(x):
        return -0.5 * (x - mu) ** 2 / s2 - LOG_SQRT_2PI - 0.5 * math.log(s2)

    return TargetDistribution(
        name=f"Normal({mu:g}, {s2:g})",
        support=SupportSpec(-math.inf, math.inf),
        density=lambda x: math.exp(log_density(x)),
        cdf=lambda x: float(special.ndtr((x - mu) / sigma)),
        sf=lambda x: float(special.ndtr((mu - x) / sigma)),
        mean=mu,
        variance=s2,
        sampler=lambda size, rng: rng.normal(mu, sigma, size),
        derivative_of_density=lambda x: -(x - mu) / s2 * math.exp(log_density(x)),
        log_density=log_density,
        score=lambda x: -(x - mu) / s2,
        family=fam,
        params=fam.model_dump(by_alias=True),
    )


def _beta(fam: BetaFamily, cfg: QuadratureConfig) -> TargetDistribution:
    a, b = fam.alpha, fam.beta
    log_norm = float(special.betaln(a, b))

    def log_density(x):
        if not 0.0 < x < 1.0:
            return -math.inf
        return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_norm

    def density(x):
        return math.exp(log_density(x)) if 0.0 < x < 1.0 else 0.0

    def score(x):
        return (a - 1.0) / x - (b - 1.0) / (1.0 - x)

    return TargetDistribution(
        name=f"Beta({a:g}, {b:g})",
        support=SupportSpec(0.0, 1.0),
        density=density,
        cdf=lambda x: float(special.betainc(a, b, min(max(x, 0.0), 1.0))),
        sf=lambda x: float(special.betainc(b, a, 1.0 - min(max(x, 0.0), 1.0))),
        mean=a / (a + b),
        variance=a * b / ((a + b) ** 2 * (a + b + 1.0)),
        sampler=lambda size, rng: rng.beta(a, b, size),
        derivative_of_density=lambda x: score(x) * density(x) if 0.0 < x < 1.0 else 0.0,
        log_density=log_density,
        score=score,
        family=fam,
        params=fam.model_dump(by_alias=True),
    )


def _gamma(fam: GammaFamily, cfg: QuadratureConfig) -> TargetDistribution:
    a, scale = fam.alpha, fam.beta
    log_norm = float(special.gammaln(a)) + a * math.log(scale)

    def log_density(x):
        if x <= 0.0:
            return -math.inf
        return (a - 1.0) * math.log(x) - x / scale - log_norm

    def density(x):
        return math.exp(log_density(x)) if x > 0.0 else 0.0

    def score(x):
        return (a - 1.0) / x - 1.0 / scale

    return TargetDistribution(
        name=f"Gamma({a:g}, {scale:g})",
        support=SupportSpec(0.0, math.inf),
        density=density,
        cdf=lambda x: float(special.gammainc(a, max(x, 0.0) / scale)),
        sf=lambda x: float(special.gammaincc(a, max(x, 0.0) / scale)),
        mean=a * scale,
        variance=a * scale ** 2,
        sampler=lambda size, rng: rng.gamma(a, scale, size),
        derivative_of_density=lambda x: score(x) * density(x) if x > 0.0 else 0.0,
        log_density=log_density,
        score=score,
        family=fam,
        params=fam.model_dump(by_alias=True),
    )


def _laplace(fam: LaplaceFamily, cfg: QuadratureConfig) -> TargetDistribution:
    def cdf(x):
        return 0.5 * math.exp(x) if x < 0 else 1.0 - 0.5 * math.exp(-x)

    def sf(x):
        return 1.0 - 0.5 * math.exp(x) if x < 0 else 0.5 * math.exp(-x)

    return TargetDistribution(
        name="Laplace(0, 1)",
        support=SupportSpec(-math.inf, math.inf),
        density=lambda x: 0.5 * math.exp(-abs(x)),
        cdf=cdf,
        sf=sf,
        mean=0.0,
        variance=2.0,
        sampler=lambda size, rng: rng.laplace(0.0, 1.0, size),
        derivative_of_density=lambda x: -math.copysign(0.5 * math.exp(-abs(x)), x) if x else 0.0,
        log_density=lambda x: -abs(x) - math.log(2.0),
        score=lambda x: -float(np.sign(x)),
        family=fam,
        kinks=(0.0,),
        params={},
    )


# Lattice families


def _lattice_tables(frozen, lo: int, hi: int):
    """pmf, cdf and strict survival tables of a scipy frozen law on lo..hi"""
    ks = np.arange(lo, hi + 1)
    return frozen.pmf(ks), frozen.cdf(ks), frozen.sf(ks)


def _lattice_target(name: str, fam: BaseModel, support: SupportSpec, frozen, mean: float, variance: float,
                    sampler: Callable, exact_masses=None) -> TargetDistribution:
    lo, hi = support.effective_bounds()
    pmf, cdf_table, sf_table = _lattice_tables(frozen, lo, hi)

    def density(x):
        k = math.floor(x)
        if k != x or not support.contains(k):
            return 0.0
        if lo <= k <= hi:
            return float(pmf[k - lo])
        return float(frozen.pmf(k))

    def cdf(x):
        k = math.floor(x)
        if k < support.lower:
            return 0.0
        if k < lo or k > hi:
            return float(frozen.cdf(k))
        return float(cdf_table[k - lo])

    def sf(x):
        k = math.floor(x)
        if k < support.lower:
            return 1.0
        if k < lo or k > hi:
            return float(frozen.sf(k))
        return float(sf_table[k - lo])

    exact_density = exact_cdf = exact_mean = None
    if exact_masses is not None:
        running, cumulative = Fraction(0), []
        for m in exact_masses:
            running += m
            cumulative.append(running)

        def exact_density(k):
            return exact_masses[k - lo] if lo <= k <= hi else Fraction(0)

        def exact_cdf(k):
            if k < lo:
                return Fraction(0)
            return cumulative[min(k, hi) - lo]

        exact_mean = sum((k * m for k, m in zip(range(lo, hi + 1), exact_masses)), Fraction(0))

    return TargetDistribution(
        name=name, support=support, density=density, cdf=cdf, sf=sf, mean=mean, variance=variance,
        sampler=sampler, exact_density=exact_density, exact_cdf=exact_cdf, exact_mean=exact_mean,
        family=fam, params=fam.model_dump(by_alias=True),
    )


def _binomial(fam: BinomialFamily, cfg: QuadratureConfig) -> TargetDistribution:
    n, p = fam.n, fam.p
    q_exact, p_exact = 1 - fam.exact_p, fam.exact_p
    masses = [comb(n, k) * p_exact ** k * q_exact ** (n - k) for k in range(n + 1)]
    return _lattice_target(
        f"Binomial({n}, {p:g})", fam, SupportSpec(0, n, MeasureKind.COUNTING), stats.binom(n, p),
        n * p, n * p * (1.0 - p), lambda size, rng: rng.binomial(n, p, size).astype(float), masses,
    )


def _poisson(fam: PoissonFamily, cfg: QuadratureConfig) -> TargetDistribution:
    lam = fam.lam
    frozen = stats.poisson(lam)
    cut = int(frozen.isf(cfg.tail_mass_cut))
    while frozen.sf(cut) >= cfg.tail_mass_cut:
        cut += 1
    logger.debug("Poisson(%g) truncated at %d (tail %.2e)", lam, cut, frozen.sf(cut))
    support = SupportSpec(0, math.inf, MeasureKind.COUNTING, cut_upper=cut)
    return _lattice_target(
        f"Poisson({lam:g})", fam, support, frozen, lam, lam,
        lambda size, rng: rng.poisson(lam, size).astype(float),
    )


def _hypergeometric(fam: HypergeometricFamily, cfg: QuadratureConfig) -> TargetDistribution:
    N, K, n = fam.N, fam.K, fam.n
    lo, hi = fam.bounds
    if lo >= hi:
        raise InvalidParameter("hypergeometric support reduces to a point", N=N, K=K, n=n)
    total = comb(N, n)
    masses = [Fraction(comb(K, k) * comb(N - K, n - k), total) for k in range(lo, hi + 1)]
    mean = n * K / N
    variance = n * (K / N) * ((N - K) / N) * ((N - n) / (N - 1))
    return _lattice_target(
        f"Hypergeometric({N}, {K}, {n})", fam, SupportSpec(lo, hi, MeasureKind.COUNTING),
        stats.hypergeom(M=N, n=K, N=n), mean, variance,
        lambda size, rng: rng.hypergeometric(K, N - K, n, size).astype(float), masses,
    )


# Specification parsing


def _parse_number(text: str):
    text = text.strip()
    if text.lower() in ('inf', '+inf', 'infinity'):
        return math.inf
    if text.lower() in ('-inf', '-infinity'):
        return -math.inf
    if '/' in text:
        return float(Fraction(text))
    value = float(text)
    return int(value) if value.is_integer() and '.' not in text and 'e' not in text.lower() else value


def parse_inline_spec(text: str) -> BaseModel:
    """``family``, ``family:p1,p2`` or ``family:name=value,...``"""
    name, _, rest = text.partition(':')
    name = name.strip().lower()
    if name not in POSITIONAL_PARAMS:
        raise InvalidParameter(f"unknown family '{name}'", spec=text)
    params: Dict = {}
    tokens = [t for t in rest.split(',') if t.strip()] if rest else []
    positional = POSITIONAL_PARAMS[name]
    for i, token in enumerate(tokens):
        if '=' in token:
            key, _, value = token.partition('=')
            params[key.strip()] = _parse_number(value)
        elif i < len(positional):
            params[positional[i]] = _parse_number(token)
        else:
            raise InvalidParameter("too many positional parameters", spec=text)
    return family_from_params(name, params)


def distribution_from_dict(payload: Dict, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> TargetDistribution:
    if 'family' in payload:
        return make_builtin(family_from_params(payload['family'], payload.get('params', {})), cfg)
    if 'custom' in payload:
        custom = payload['custom']
        try:
            lower, upper = (_parse_number(str(v)) for v in custom['support'])
            measure = MeasureKind(custom.get('measure', 'lebesgue'))
            table = [(float(x), _table_mass(p)) for x, p in custom['density_table']]
        except (KeyError, ValueError, TypeError) as exc:
            raise InvalidParameter("malformed custom distribution", detail=str(exc)) from exc
        support = SupportSpec(lower, upper, measure)
        return make_custom_from_table(support, table, cfg, name=custom.get('name', 'custom'))
    raise InvalidParameter("distribution spec needs 'family' or 'custom'")


def _table_mass(p):
    if isinstance(p, str):
        return Fraction(p)
    if isinstance(p, int):
        return Fraction(p)
    return float(p)


def parse_distribution_spec(spec, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> TargetDistribution:
    """Target from a dict, a JSON file path or an inline ``family:params`` string"""
    if isinstance(spec, dict):
        return distribution_from_dict(spec, cfg)
    if isinstance(spec, BaseModel):
        return make_builtin(spec, cfg)
    text = str(spec).strip()
    if text.endswith('.json') or os.path.isfile(text):
        try:
            with open(text, 'r', encoding='utf-8') as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParameter("cannot read distribution file", path=text, detail=str(exc)) from exc
        return distribution_from_dict(payload, cfg)
    return make_builtin(parse_inline_spec(text), cfg)
