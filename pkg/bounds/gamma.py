import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Optional, Sequence

from distribution import (
    BetaFamily,
    BinomialFamily,
    GammaFamily,
    NormalFamily,
    PoissonFamily,
    TargetDistribution,
)
from numerics import (
    DEFAULT_QUADRATURE,
    InvalidParameter,
    QuadratureConfig,
    UnsupportedOrder,
    ZeroDensity,
    integrate,
    lattice_sum,
)
from representations import tail_ratio
from stein_ops import OperatorResult, TestFunction, check_shift, chi, delta, identity

from .reports import ShiftSequence

logger = logging.getLogger(__name__)

GAMMA_METHODS = ("auto", "family", "lemma", "nested")


def as_shift_list(ells) -> List[int]:
    if isinstance(ells, ShiftSequence):
        return list(ells.ells)
    if isinstance(ells, int):
        return [ells]
    return [int(e) for e in ells]


def rising_factorial(a, m: int):
    """a(a+1)⋯(a+m−1), with an empty product equal to 1"""
    out = 1
    for i in range(m):
        out = out * (a + i)
    return out


def _is_identity(h: Optional[TestFunction]) -> bool:
    return h is None or h.is_identity


def _standardizer_list(standardizers: Optional[Sequence[TestFunction]], k: int) -> List[TestFunction]:
    if not standardizers:
        return [identity()] * k
    return [standardizers[min(i, len(standardizers) - 1)] for i in range(k)]


def check_order(dist: TargetDistribution, ells: List[int], k: int, cfg: QuadratureConfig) -> List[int]:
    if k < 1 or k > len(ells):
        raise InvalidParameter("order must lie between 1 and the length of the shift sequence", k=k,
                               length=len(ells))
    prefix = [check_shift(dist, e) for e in ells[:k]]
    if dist.is_lattice and dist.support.is_finite:
        lo, hi = dist.support.effective_bounds()
        if hi - lo < k:
            raise UnsupportedOrder("support exhausted: iterated indicators vanish identically", k=k,
                                   support_width=hi - lo)
    return prefix


def _scale(value, denominator: int, exact: bool):
    if exact:
        return Fraction(value) / denominator
    return float(value) / denominator


# Closed forms per family


def pearson_kernel(dist: TargetDistribution):
    """(τ, δ) with τ the quadratic Stein kernel and δ its leading coefficient, or None"""
    fam = dist.family
    if isinstance(fam, NormalFamily):
        return (lambda x: fam.sigma2), 0.0
    if isinstance(fam, GammaFamily):
        return (lambda x: fam.beta * x), 0.0
    if isinstance(fam, BetaFamily):
        s = fam.alpha + fam.beta
        return (lambda x: x * (1.0 - x) / s), -1.0 / s
    return None


def family_gamma(dist: TargetDistribution, ells: List[int], k: int,
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> Optional[Callable]:
    """Γ_k in closed form for Pearson and Ord families with identity standardizers"""
    pearson = pearson_kernel(dist)
    if pearson is not None:
        tau, d = pearson
        denominator = math.factorial(k) * math.prod(1.0 - j * d for j in range(1, k))
        return lambda x: tau(x) ** k / denominator

    fam = dist.family
    plus = ShiftSequence.plus_count(ells[:k])
    minus = k - plus
    exact = dist.use_exact(cfg)
    fact = math.factorial(k)
    if isinstance(fam, PoissonFamily):
        lam = fam.lam
        return lambda x: math.prod(x - i for i in range(plus)) * lam ** minus / fact
    if isinstance(fam, BinomialFamily):
        n = fam.n
        p = fam.exact_p if exact else fam.p
        q = 1 - p

        def ord_gamma(x):
            value = q ** plus * math.prod(x - i for i in range(plus)) * p ** minus
            value = value * math.prod(n - x - j for j in range(minus))
            return _scale(value, fact, exact) if exact else value / fact

        return ord_gamma
    return None


# Lemma forms


def _continuous_lemma_density(dist: TargetDistribution, k: int, cfg: QuadratureConfig) -> Callable:
    """G_k = p·Γ_k from the one-dimensional moments below and above x"""
    norm = math.factorial(k) * math.factorial(k - 1)

    def moments(x, upper_side: bool, ratio: bool):
        sign = 1.0 if upper_side else -1.0
        powers = []
        for j in (k - 1, k):
            fn = (lambda j: lambda y: (sign * (y - x)) ** j)(j)
            if ratio:
                powers.append(tail_ratio(dist, fn, x, upper_side, cfg).value)
            else:
                side = dist.support.restrict(lower=x) if upper_side else dist.support.restrict(upper=x)
                powers.append(dist.expect(fn, cfg, support=side).value)
        return powers

    def density(x):
        below = moments(x, False, False)
        above = moments(x, True, False)
        return (below[0] * above[1] + below[1] * above[0]) / norm

    def ratio(x):
        # divide the lighter tail by p(x) in log-space
        if dist.cdf_at(x) > 0.5:
            below, above = moments(x, False, False), moments(x, True, True)
        else:
            below, above = moments(x, False, True), moments(x, True, False)
        return (below[0] * above[1] + below[1] * above[0]) / norm

    density.ratio = ratio
    return density


def _discrete_lemma_density(dist: TargetDistribution, ells: List[int], k: int, cfg: QuadratureConfig) -> Callable:
    exact = dist.use_exact(cfg)
    a = ShiftSequence.plus_count(ells)
    b = ShiftSequence.minus_offset(ells)
    offset = a - b - 2
    norm = math.factorial(k) * math.factorial(k - 1)
    points = list(dist.lattice())
    masses = {y: dist.pdf(y, exact) for y in points}

    def density(x):
        left = [(x - y - a + 1, masses[y]) for y in points if y + a <= x]
        right = [(y - x + b + 1, masses[y]) for y in points if x <= y + b]
        a0 = lattice_sum(rising_factorial(s, k - 1) * m for s, m in left).value
        a1 = lattice_sum(rising_factorial(s, k - 1) * s * m for s, m in left).value
        b0 = lattice_sum(rising_factorial(t, k - 1) * m for t, m in right).value
        b1 = lattice_sum(rising_factorial(t, k - 1) * t * m for t, m in right).value
        return _scale(a1 * b0 + a0 * b1 + offset * a0 * b0, norm, exact)

    return density


# Iterated definition


def _discrete_nested_density(dist: TargetDistribution, ells: List[int], k: int, hs: List[TestFunction],
                             cfg: QuadratureConfig) -> Callable:
    """G_k by summing the iterated definition level by level over the lattice"""
    exact = dist.use_exact(cfg)
    points = list(dist.lattice())
    left = [dist.pdf(y, exact) for y in points]
    right = list(left)
    for i in range(k - 1):
        ell = ells[i]
        weights = [delta(-ell, hs[i], y, cfg) for y in points]
        left = [weights[j] * lattice_sum(left[m] for m, y in enumerate(points) if chi(ell, y, x3)).value
                for j, x3 in enumerate(points)]
        right = [weights[j] * lattice_sum(right[m] for m, y in enumerate(points) if chi(-ell, x4, y)).value
                 for j, x4 in enumerate(points)]
    inner, h_k = ells[k - 1], hs[k - 1]
    h_values = [h_k(y) for y in points]

    def density(x):
        lows = [m for m, y in enumerate(points) if chi(inner, y, x)]
        highs = [m for m, y in enumerate(points) if chi(-inner, x, y)]
        u0 = lattice_sum(left[m] for m in lows).value
        u1 = lattice_sum(left[m] * h_values[m] for m in lows).value
        v0 = lattice_sum(right[m] for m in highs).value
        v1 = lattice_sum(right[m] * h_values[m] for m in highs).value
        return u0 * v1 - u1 * v0

    return density


def _continuous_nested_density(dist: TargetDistribution, k: int, hs: List[TestFunction],
                               cfg: QuadratureConfig) -> Callable:
    """G_k by nested quadrature over the two monotone chains of the iterated definition"""
    if k > cfg.generic_order_cap:
        raise UnsupportedOrder("nested evaluation beyond the configured order cap", k=k,
                               cap=cfg.generic_order_cap)
    weights = [(lambda h: (lambda s: h.derivative_at(s, cfg)))(h) for h in hs]
    points = dist.quad_breakpoints()

    def chain(level: int, upper_side: bool) -> Callable:
        # chain(j)(t): j-fold iterated mass on one side of t, weighted by the standardizers
        if level == 1:
            return (lambda t: dist.survival(t)) if upper_side else (lambda t: dist.cdf_at(t))
        previous = chain(level - 1, upper_side)
        weight = weights[level - 2]

        @lru_cache(maxsize=8192)
        def fn(t):
            side = dist.support.restrict(lower=t) if upper_side else dist.support.restrict(upper=t)
            return integrate(lambda s: previous(s) * weight(s), side, cfg, points).value

        return fn

    def outer(upper_side: bool, phi: Callable, x: float):
        side = dist.support.restrict(lower=x) if upper_side else dist.support.restrict(upper=x)
        if k == 1:
            return dist.expect(phi, cfg, support=side).value
        base = chain(k - 1, upper_side)
        weight = weights[k - 2]
        return integrate(lambda s: base(s) * weight(s) * phi(s), side, cfg, points).value

    h_k = hs[k - 1]
    one = lambda s: 1.0

    def density(x):
        return outer(False, one, x) * outer(True, h_k, x) - outer(False, h_k, x) * outer(True, one, x)

    return density


def gamma_density(dist: TargetDistribution, ells, k: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                  method: str = "auto", standardizers: Optional[Sequence[TestFunction]] = None) -> Callable:
    """x ↦ p(x)Γ_k(x), the form in which the density cancels inside expectations"""
    ells = check_order(dist, as_shift_list(ells), k, cfg)
    method = resolve_method(dist, ells, k, cfg, method, standardizers)
    if method == "family":
        closed = family_gamma(dist, ells, k, cfg)
        exact = dist.use_exact(cfg)
        return lambda x: closed(x) * dist.pdf(x, exact)
    if method == "lemma":
        if dist.is_lattice:
            return _discrete_lemma_density(dist, ells, k, cfg)
        return _continuous_lemma_density(dist, k, cfg)
    hs = _standardizer_list(standardizers, k)
    if dist.is_lattice:
        return _discrete_nested_density(dist, ells, k, hs, cfg)
    return _continuous_nested_density(dist, k, hs, cfg)


def resolve_method(dist: TargetDistribution, ells: List[int], k: int, cfg: QuadratureConfig, method: str,
                   standardizers: Optional[Sequence[TestFunction]]) -> str:
    if method not in GAMMA_METHODS:
        raise InvalidParameter("unknown gamma method", method=method, known=", ".join(GAMMA_METHODS))
    generic = standardizers is not None and not all(_is_identity(h) for h in standardizers)
    if generic:
        if method not in ("auto", "nested"):
            raise InvalidParameter("closed forms need identity standardizers", method=method)
        return "nested"
    if method == "auto":
        method = "family" if family_gamma(dist, ells, k, cfg) is not None else "lemma"
    if method == "family" and family_gamma(dist, ells, k, cfg) is None:
        raise InvalidParameter("no closed form for this family", target=dist.name)
    logger.debug("Gamma_%d for %s via %s", k, dist.name, method)
    return method


def gamma_k(dist: TargetDistribution, ells, k: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
            method: str = "auto", standardizers: Optional[Sequence[TestFunction]] = None) -> OperatorResult:
    """Iterated coefficient Γ_k^ℓ as a function on the support"""
    shift_list = check_order(dist, as_shift_list(ells), k, cfg)
    method = resolve_method(dist, shift_list, k, cfg, method, standardizers)
    label = f"Gamma_{k}"
    if method == "family":
        return OperatorResult(family_gamma(dist, shift_list, k, cfg), dist, label)

    density = gamma_density(dist, shift_list, k, cfg, method, standardizers)
    if not dist.is_lattice and method == "lemma":
        return OperatorResult(density.ratio, dist, label)

    exact = dist.use_exact(cfg)

    def fn(x):
        px = dist.pdf(x, exact)
        if px == 0:
            raise ZeroDensity("density vanishes at evaluation point", x=x, target=dist.name)
        return density(x) / px

    return OperatorResult(fn, dist, label)
