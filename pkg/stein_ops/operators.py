import logging
import math
import threading
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

from pydantic import BaseModel

from distribution import TargetDistribution
from numerics import (
    DEFAULT_QUADRATURE,
    DegenerateDenominator,
    IntegrationResult,
    MissingDerivative,
    QuadratureConfig,
    ZeroDensity,
    integrate,
    lattice_sum,
    tolerance_for,
)

from .config import check_shift
from .functions import TestFunction, as_test_function, delta

logger = logging.getLogger(__name__)

_CENTERING_CACHE: Dict[Tuple, object] = {}
_CENTERING_LOCK = threading.Lock()
CENTERING_CACHE_SIZE = 4096


@dataclass(frozen=True)
class OperatorResult:
    """x ↦ value on the support of ``dist``, zero outside it"""

    fn: Callable
    dist: TargetDistribution
    label: str = ""
    derivative: Optional[Callable] = None

    def __call__(self, x):
        if not self.dist.in_support(x):
            return 0
        return self.fn(x)

    def eval(self, x):
        return self(x)

    def as_test_function(self, with_derivative: bool = True) -> TestFunction:
        derivs: Tuple[Callable, ...] = ()
        if with_derivative and self.derivative is not None:
            derivs = (self._derivative_or_zero,)
        return TestFunction(self.__call__, derivs, self.label)

    def _derivative_or_zero(self, x):
        return self.derivative(x) if self.dist.in_support(x) else 0.0


def mean_of(dist: TargetDistribution, h, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """E[h(X)], cached per (target, function, exactness)"""
    h = as_test_function(h)
    exact = dist.use_exact(cfg)
    key = (dist, h.value, exact, cfg)
    with _CENTERING_LOCK:
        if key in _CENTERING_CACHE:
            return _CENTERING_CACHE[key]
    value = dist.expect(h, cfg, h.breakpoints).value
    with _CENTERING_LOCK:
        if len(_CENTERING_CACHE) >= CENTERING_CACHE_SIZE:
            _CENTERING_CACHE.clear()
        _CENTERING_CACHE[key] = value
    return value


def centered(dist: TargetDistribution, h, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> TestFunction:
    h = as_test_function(h)
    m = mean_of(dist, h, cfg)
    return TestFunction(lambda x: h(x) - m, h.derivatives, f"{h.label}-E", h.breakpoints, h.sup_norm)


def score_function(dist: TargetDistribution, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> Callable:
    """ρ = p'/p from the closed form, the density derivative, or central differences of log p"""
    if dist.score is not None:
        return dist.score
    if dist.derivative_of_density is not None:
        return lambda x: dist.derivative_of_density(x) / dist.density(x)
    if not cfg.finite_differences:
        raise MissingDerivative("target has no density derivative", target=dist.name)
    logger.debug("central differences for the score of %s", dist.name)

    def score(x):
        step = cfg.fd_step * max(1.0, abs(x))
        return (dist.log_pdf(x + step) - dist.log_pdf(x - step)) / (2.0 * step)

    return score


def canonical_op(dist: TargetDistribution, ell: int, f, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> OperatorResult:
    """T^ℓ f = Δ^ℓ(f p)/p"""
    ell = check_shift(dist, ell)
    f = as_test_function(f)

    if ell == 0:
        score = score_function(dist, cfg)

        def fn(x):
            if dist.density(x) == 0:
                raise ZeroDensity("density vanishes at evaluation point", x=x, target=dist.name)
            return f.derivative_at(x, cfg) + f(x) * score(x)

        return OperatorResult(fn, dist, f"T{f.label}")

    exact = dist.use_exact(cfg)

    def fp(y):
        py = dist.pdf(y, exact)
        return f(y) * py if py != 0 else py

    def fn(x):
        px = dist.pdf(x, exact)
        if px == 0:
            raise ZeroDensity("mass vanishes at evaluation point", x=x, target=dist.name)
        return delta(ell, fp, x) / px

    return OperatorResult(fn, dist, f"T{f.label}")


def _partial_moment(dist: TargetDistribution, ell: int, h: TestFunction, x, cfg: QuadratureConfig,
                    mean_h=None) -> IntegrationResult:
    mean_h = mean_of(dist, h, cfg) if mean_h is None else mean_h
    shift = ell * (ell + 1) // 2

    if dist.is_lattice:
        exact = dist.use_exact(cfg)
        lo, hi = dist.support.effective_bounds()
        edge = math.floor(x - shift)
        terms = lambda ks: ((h(k) - mean_h) * dist.pdf(k, exact) for k in ks)
        if exact or dist.cdf_at(edge) <= 0.5:
            return lattice_sum(terms(range(lo, min(edge, hi) + 1)))
        logger.debug("right-tail form for partial moment at x=%s", x)
        right = lattice_sum(terms(range(max(edge + 1, lo), hi + 1)))
        return IntegrationResult(-right.value, right.error_estimate)

    weighted = lambda y: (h(y) - mean_h) * dist.density(y)
    points = h.breakpoints + dist.quad_breakpoints()
    if dist.cdf_at(x) <= 0.5:
        return integrate(weighted, dist.support.restrict(upper=x), cfg, points)
    right = integrate(weighted, dist.support.restrict(lower=x), cfg, points)
    return IntegrationResult(-right.value, right.error_estimate)


def partial_moment(dist: TargetDistribution, ell: int, h, x, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """p(x)·L^ℓ h(x): the centered partial integral or sum up to x"""
    ell = check_shift(dist, ell)
    return _partial_moment(dist, ell, as_test_function(h), x, cfg).value


def _log_ratio_integral(dist: TargetDistribution, h: TestFunction, x: float, cfg: QuadratureConfig,
                        mean_h) -> IntegrationResult:
    """L h(x) for Lebesgue targets with p(y)/p(x) taken in log-space"""
    log_px = dist.log_pdf(x)
    if log_px == -math.inf:
        raise ZeroDensity("density vanishes at evaluation point", x=x, target=dist.name)

    def integrand(y):
        ly = dist.log_pdf(y)
        if ly == -math.inf:
            return 0.0
        return (h(y) - mean_h) * math.exp(ly - log_px)

    points = h.breakpoints + dist.quad_breakpoints()
    if dist.cdf_at(x) <= 0.5:
        return integrate(integrand, dist.support.restrict(upper=x), cfg, points)
    right = integrate(integrand, dist.support.restrict(lower=x), cfg, points)
    return IntegrationResult(-right.value, right.error_estimate)


def pseudo_inverse(dist: TargetDistribution, ell: int, h, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> OperatorResult:
    """L^ℓ h(x) = (1/p(x)) Σ/∫ χ^ℓ(y, x)(h(y) − E h) p(y) dμ(y)"""
    ell = check_shift(dist, ell)
    h = as_test_function(h)
    mean_h = mean_of(dist, h, cfg)

    if dist.is_lattice:
        exact = dist.use_exact(cfg)

        def fn(x):
            px = dist.pdf(x, exact)
            if px == 0:
                raise ZeroDensity("mass vanishes at evaluation point", x=x, target=dist.name)
            return _partial_moment(dist, ell, h, x, cfg, mean_h).value / px

        return OperatorResult(fn, dist, f"L{h.label}")

    score = score_function(dist, cfg)

    def fn(x):
        return _log_ratio_integral(dist, h, x, cfg, mean_h).value

    def derivative(x):
        # (L h)' = h̄ − L h·ρ
        return h(x) - mean_h - fn(x) * score(x)

    return OperatorResult(fn, dist, f"L{h.label}", derivative)


def stein_kernel(dist: TargetDistribution, ell: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> OperatorResult:
    """τ = −L(Id − μ)"""
    inverse = pseudo_inverse(dist, ell, TestFunction(lambda x: x, (lambda x: 1,), "id"), cfg)
    derivative = None
    if inverse.derivative is not None:
        derivative = lambda x: -inverse.derivative(x)
    return OperatorResult(lambda x: -inverse.fn(x), dist, "tau", derivative)


def standardized_op(dist: TargetDistribution, ell: int, eta, g,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> OperatorResult:
    """A g = η̄ g + L η·Δ^{−ℓ} g"""
    ell = check_shift(dist, ell)
    eta, g = as_test_function(eta), as_test_function(g)
    mean_eta = mean_of(dist, eta, cfg)
    inverse = pseudo_inverse(dist, ell, eta, cfg)

    def fn(x):
        return (eta(x) - mean_eta) * g(x) + inverse.fn(x) * delta(-ell, g, x, cfg)

    return OperatorResult(fn, dist, f"A{g.label}")


def solve_stein_equation(dist: TargetDistribution, ell: int, h, eta,
                         cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> OperatorResult:
    """g(x) = L h(x+ℓ) / L η(x+ℓ), solving A g = T(L η·g(·−ℓ)) = h − E h on the support.

    On a lattice the ratio is read one step over; at the end point where x+ℓ leaves
    the support A g does not depend on g(x), which is set to zero there.
    """
    ell = check_shift(dist, ell)
    h, eta = as_test_function(h), as_test_function(eta)
    inv_h = pseudo_inverse(dist, ell, h, cfg)
    inv_eta = pseudo_inverse(dist, ell, eta, cfg)

    def fn(x):
        y = x + ell
        if not dist.in_support(y):
            return 0
        denominator = inv_eta.fn(y)
        if denominator == 0:
            raise DegenerateDenominator("L eta vanishes inside the support", x=y, target=dist.name)
        return inv_h.fn(y) / denominator

    return OperatorResult(fn, dist, f"g[{h.label}]")


class CanonicalClassReport(BaseModel):
    function: str
    ell: int
    mean_of_operator: float
    error_estimate: float
    boundary_lower: Optional[float] = None
    boundary_upper: Optional[float] = None
    admissible: bool


def canonical_class_check(dist: TargetDistribution, ell: int, f,
                          cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> CanonicalClassReport:
    """E[T f(X)] and the boundary values of f·p at finite support ends"""
    ell = check_shift(dist, ell)
    f = as_test_function(f)
    operator = canonical_op(dist, ell, f, cfg)
    result = dist.expect(operator, cfg, f.breakpoints)

    lower = upper = None
    if dist.is_lattice:
        lo, hi = dist.support.effective_bounds()
        lower = float(f(lo) * dist.pdf(lo)) if math.isfinite(dist.support.lower) else None
        upper = float(f(hi) * dist.pdf(hi)) if math.isfinite(dist.support.upper) else None
    else:
        offset = max(cfg.endpoint_offset, 1e-9)
        if math.isfinite(dist.support.lower):
            a = dist.support.lower + offset
            lower = float(f(a) * dist.density(a))
        if math.isfinite(dist.support.upper):
            b = dist.support.upper - offset
            upper = float(f(b) * dist.density(b))

    mean_value = float(result.value)
    tol = max(tolerance_for(result.error_estimate), 1e-8)
    return CanonicalClassReport(
        function=f.label, ell=ell, mean_of_operator=mean_value, error_estimate=result.error_estimate,
        boundary_lower=lower, boundary_upper=upper, admissible=abs(mean_value) <= tol,
    )
