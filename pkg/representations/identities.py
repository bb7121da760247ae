import logging
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Dict

from distribution import BinomialFamily, PoissonFamily, TargetDistribution
from numerics import (
    DEFAULT_QUADRATURE,
    IntegrationResult,
    InvalidParameter,
    QuadratureConfig,
    integrate,
    integrate2,
    lattice_sum,
    tolerance_for,
)
from stein_ops import as_test_function, check_shift, delta, mean_of, partial_moment

from .kernel import kernel_K, phi_interval

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of an identity and the tolerance they are compared with"""

    lhs: object
    rhs: object
    error_estimate: float = 0.0
    extra: Dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return float(self.lhs - self.rhs)

    @property
    def tolerance(self) -> float:
        return tolerance_for(self.error_estimate)

    @property
    def holds(self) -> bool:
        return abs(self.residual) <= self.tolerance

    def to_dict(self) -> Dict:
        return {
            'lhs': float(self.lhs),
            'rhs': float(self.rhs),
            'residual': self.residual,
            'holds': self.holds,
            **{key: float(value) for key, value in self.extra.items()},
        }


@dataclass(frozen=True)
class LagrangeReport:
    lhs_sq: object
    product: object
    remainder: object
    error_estimate: float = 0.0

    @property
    def residual(self) -> float:
        return float(self.lhs_sq - (self.product - self.remainder))

    @property
    def holds(self) -> bool:
        tol = tolerance_for(self.error_estimate)
        return abs(self.residual) <= tol and float(self.remainder) >= -tol

    def to_dict(self) -> Dict:
        return {
            'lhs_sq': float(self.lhs_sq),
            'product': float(self.product),
            'remainder': float(self.remainder),
            'residual': self.residual,
            'holds': self.holds,
        }


def covariance(dist: TargetDistribution, h, g, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> IntegrationResult:
    """Cov[h(X), g(X)] computed as E[(h − E h)(g − E g)]"""
    h, g = as_test_function(h), as_test_function(g)
    mh, mg = mean_of(dist, h, cfg), mean_of(dist, g, cfg)
    return dist.expect(lambda x: (h(x) - mh) * (g(x) - mg), cfg, h.breakpoints + g.breakpoints)


def cov_via_inverse(dist: TargetDistribution, ell: int, h, g, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Cov[h(X), g(X)] = E[−L^ℓ h(X) Δ^{−ℓ}g(X)], with the density cancelled"""
    ell = check_shift(dist, ell)
    h, g = as_test_function(h), as_test_function(g)
    mean_h = mean_of(dist, h, cfg)

    if dist.is_lattice:
        exact = dist.use_exact(cfg)
        points = list(dist.lattice())
        shift = ell * (ell + 1) // 2
        # p·L h at k is the running sum of centered masses up to k − shift
        running = list(accumulate((h(k) - mean_h) * dist.pdf(k, exact) for k in points))
        lo = points[0]
        terms = []
        for k in points:
            idx = k - shift - lo
            moment = running[idx] if idx >= 0 else 0
            terms.append(-moment * delta(-ell, g, k, cfg) if moment != 0 else 0)
        return lattice_sum(terms).value

    def integrand(x):
        return -partial_moment(dist, 0, h, x, cfg) * g.derivative_at(x, cfg)

    return integrate(integrand, dist.support, cfg, g.breakpoints + h.breakpoints + dist.quad_breakpoints()).value


def cov_via_kernel(dist: TargetDistribution, ell: int, h, g, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """∫∫ Δ^{−ℓ}h(x) K^ℓ(x, x') Δ^{−ℓ}g(x') dμ(x) dμ(x')"""
    ell = check_shift(dist, ell)
    h, g = as_test_function(h), as_test_function(g)

    if dist.is_lattice:
        points = list(dist.lattice())
        dh = [delta(-ell, h, k, cfg) for k in points]
        dg = [delta(-ell, g, k, cfg) for k in points]
        terms = []
        for i, x in enumerate(points):
            if dh[i] == 0:
                continue
            for j, y in enumerate(points):
                if dg[j] != 0:
                    terms.append(dh[i] * kernel_K(dist, ell, x, y, cfg) * dg[j])
        return lattice_sum(terms).value

    dh = lambda x: h.derivative_at(x, cfg)
    dg = lambda y: g.derivative_at(y, cfg)
    points = h.breakpoints + g.breakpoints + dist.quad_breakpoints()
    result = integrate2(
        lambda x, y: dh(x) * kernel_K(dist, 0, x, y, cfg) * dg(y),
        dist.support, dist.support, cfg, points, lambda x: (x,) + points,
    )
    return result.value


def variance_pair_identity(dist: TargetDistribution, g, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Var[g(X)] = E[(g(X₂) − g(X₁))² 1[X₁ < X₂]]"""
    g = as_test_function(g)
    if dist.is_lattice:
        exact = dist.use_exact(cfg)
        points = [(k, g(k), dist.pdf(k, exact)) for k in dist.lattice()]
        terms = ((g2 - g1) ** 2 * p1 * p2 for i, (_, g1, p1) in enumerate(points) for _, g2, p2 in points[i + 1:])
        return lattice_sum(terms).value

    points = g.breakpoints + dist.quad_breakpoints()
    result = integrate2(
        lambda x1, x2: (g(x2) - g(x1)) ** 2 * dist.density(x1) * dist.density(x2),
        dist.support, lambda x1: dist.support.restrict(lower=x1), cfg, points, points,
    )
    return result.value


def increment_representation(dist: TargetDistribution, ell: int, g, x1, x2,
                             cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> IdentityCheck:
    """g(x₂) − g(x₁) = E[Φ^ℓ(x₁, X, x₂) Δ^{−ℓ}g(X)]"""
    ell = check_shift(dist, ell)
    g = as_test_function(g)
    interval = phi_interval(dist, ell, x1, x2)
    if dist.is_lattice:
        result = lattice_sum(delta(-ell, g, k, cfg) for k in interval.points()) if interval else IntegrationResult(0)
    else:
        result = integrate(lambda x: g.derivative_at(x, cfg), interval, cfg, g.breakpoints)
    return IdentityCheck(g(x2) - g(x1), result.value, result.error_estimate)


def lagrange_residual(dist: TargetDistribution, ell: int, a, b, u, v,
                      cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> LagrangeReport:
    """E[abΦ]² = E[a²Φ]E[b²Φ] − E[(a(X₁)b(X₂) − a(X₂)b(X₁))² Φ(u, X₁, X₂, v)]

    With Φ the density cancels, so each expectation is an integral against μ over the
    points between u and v.
    """
    ell = check_shift(dist, ell)
    a, b = as_test_function(a), as_test_function(b)
    interval = phi_interval(dist, ell, u, v)
    if interval is None:
        return LagrangeReport(0, 0, 0)

    if dist.is_lattice:
        pts = [(a(k), b(k)) for k in interval.points()]
        cross = lattice_sum(ak * bk for ak, bk in pts)
        first = lattice_sum(ak * ak for ak, _ in pts)
        second = lattice_sum(bk * bk for _, bk in pts)
        remainder = lattice_sum((a1 * b2 - a2 * b1) ** 2 for i, (a1, b1) in enumerate(pts)
                                for a2, b2 in pts[i + 1:])
        error = max(cross.error_estimate, first.error_estimate, second.error_estimate, remainder.error_estimate)
        return LagrangeReport(cross.value ** 2, first.value * second.value, remainder.value, error)

    points = a.breakpoints + b.breakpoints
    cross = integrate(lambda x: a(x) * b(x), interval, cfg, points)
    first = integrate(lambda x: a(x) ** 2, interval, cfg, points)
    second = integrate(lambda x: b(x) ** 2, interval, cfg, points)
    remainder = integrate2(lambda x1, x2: (a(x1) * b(x2) - a(x2) * b(x1)) ** 2, interval,
                           lambda x1: interval.restrict(lower=x1), cfg, points, points)
    scale = max(1.0, abs(cross.value), abs(first.value), abs(second.value))
    error = scale * (cross.error_estimate + first.error_estimate + second.error_estimate) + remainder.error_estimate
    return LagrangeReport(cross.value ** 2, first.value * second.value, remainder.value, error)


def natural_gradient_identity(dist: TargetDistribution, g, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> IdentityCheck:
    """Cov[X, g(X)] = Var[X]·E[∇g(X)] for the binomial and Poisson natural gradients"""
    g = as_test_function(g)
    family = dist.family
    exact = dist.use_exact(cfg)
    backward = lambda x: x * delta(-1, g, x) if x != 0 else 0

    if isinstance(family, BinomialFamily):
        n = family.n
        p = family.exact_p if exact else family.p
        variance = n * p * (1 - p)
        grad = lambda x: (backward(x) + ((n - x) * delta(1, g, x) if x != n else 0)) / n
        forms = {
            'backward_form': (1 - p) * dist.expect(backward, cfg).value,
            'forward_form': p * dist.expect(lambda x: (n - x) * delta(1, g, x), cfg).value,
        }
    elif isinstance(family, PoissonFamily):
        lam = family.lam
        variance = lam
        grad = lambda x: (backward(x) / lam + delta(1, g, x)) / 2
        forms = {
            'backward_form': dist.expect(backward, cfg).value,
            'forward_form': lam * dist.expect(lambda x: delta(1, g, x), cfg).value,
        }
    else:
        raise InvalidParameter("natural gradients are defined for binomial and Poisson targets", target=dist.name)

    cov = covariance(dist, lambda x: x, g, cfg)
    expected_grad = dist.expect(grad, cfg)
    error = cov.error_estimate + abs(float(variance)) * expected_grad.error_estimate
    return IdentityCheck(cov.value, variance * expected_grad.value, error, forms)


def direct_covariance(dist: TargetDistribution, h, g, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    return covariance(dist, h, g, cfg).value
