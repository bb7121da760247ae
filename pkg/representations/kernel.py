import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from distribution import TargetDistribution
from numerics import (
    DEFAULT_QUADRATURE,
    IntegrationResult,
    QuadratureConfig,
    SupportSpec,
    ZeroDensity,
    integrate,
    lattice_sum,
)
from stein_ops import as_test_function, check_shift, chi, delta

logger = logging.getLogger(__name__)


def kernel_K(dist: TargetDistribution, ell: int, x, x_prime, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """K^ℓ(x, x') = E[χ^ℓ(X, x∧x')]·(1 − E[χ^ℓ(X, x∨x')])"""
    ell = check_shift(dist, ell)
    exact = dist.use_exact(cfg)
    lo, hi = (x, x_prime) if x <= x_prime else (x_prime, x)
    return dist.left_mass(ell, lo, exact) * dist.upper_mass(ell, hi, exact)


def kernel_matrix(dist: TargetDistribution, ell: int, xs: Sequence[float],
                  cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """Gram matrix [K^ℓ(x_i, x_j)]"""
    m = len(xs)
    gram = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            gram[i, j] = gram[j, i] = float(kernel_K(dist, ell, xs[i], xs[j], cfg))
    return gram


def kernel_over_density(dist: TargetDistribution, ell: int, x, x_prime, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """K^ℓ(x, x')/p(x), the profile plotted against x'"""
    px = dist.pdf(x, dist.use_exact(cfg))
    if px == 0:
        raise ZeroDensity("density vanishes at evaluation point", x=x, target=dist.name)
    return kernel_K(dist, ell, x, x_prime, cfg) / px


def phi_interval(dist: TargetDistribution, ell: int, u, v) -> Optional[SupportSpec]:
    """Points x with χ^ℓ(u, x)χ^{−ℓ}(x, v) = 1, intersected with the support"""
    lower = u + (1 if ell == 1 else 0)
    upper = v - (1 if ell == -1 else 0)
    if lower > upper:
        return None
    return dist.support.restrict(lower, upper)


def phi_weight(dist: TargetDistribution, ell: int, u, x, v, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Φ^ℓ(u, x, v) = χ^ℓ(u, x)χ^{−ℓ}(x, v)/p(x)"""
    ell = check_shift(dist, ell)
    if u >= v or not chi(ell, u, x) or not chi(-ell, x, v):
        return 0
    if dist.is_lattice:
        px = dist.pdf(x, dist.use_exact(cfg))
        return 1 / px if px != 0 else 0
    log_px = dist.log_pdf(x)
    return math.exp(-log_px) if log_px > -math.inf else 0.0


def phi_weight4(dist: TargetDistribution, ell: int, u, x1, x2, v, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Φ^ℓ(u, x1, x2, v) = χ^ℓ(u, x1)χ^{ℓ²}(x1, x2)χ^{−ℓ}(x2, v)/(p(x1)p(x2))"""
    ell = check_shift(dist, ell)
    if u >= v or not (chi(ell, u, x1) and chi(ell * ell, x1, x2) and chi(-ell, x2, v)):
        return 0
    if dist.is_lattice:
        exact = dist.use_exact(cfg)
        p1, p2 = dist.pdf(x1, exact), dist.pdf(x2, exact)
        return 1 / (p1 * p2) if p1 != 0 and p2 != 0 else 0
    log_p = dist.log_pdf(x1) + dist.log_pdf(x2)
    return math.exp(-log_p) if log_p > -math.inf else 0.0


def tail_ratio(dist: TargetDistribution, fn: Callable, x, upper_side: bool, cfg: QuadratureConfig,
               breakpoints: Sequence[float] = ()) -> IntegrationResult:
    """∫ fn(y) p(y)/p(x) dy over y ≥ x (upper_side) or y ≤ x, ratio taken in log-space"""
    log_px = dist.log_pdf(x)
    if log_px == -math.inf:
        raise ZeroDensity("density vanishes at evaluation point", x=x, target=dist.name)

    def integrand(y):
        ly = dist.log_pdf(y)
        return fn(y) * math.exp(ly - log_px) if ly > -math.inf else 0.0

    side = dist.support.restrict(lower=x) if upper_side else dist.support.restrict(upper=x)
    return integrate(integrand, side, cfg, tuple(breakpoints) + dist.quad_breakpoints())


def inverse_via_kernel(dist: TargetDistribution, ell: int, h, x_prime, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """−L^ℓ h(x') = E[K^ℓ(X, x')/(p(X)p(x')) Δ^{−ℓ}h(X)]"""
    ell = check_shift(dist, ell)
    h = as_test_function(h)
    exact = dist.use_exact(cfg)
    p_prime = dist.pdf(x_prime, exact)
    if p_prime == 0:
        raise ZeroDensity("density vanishes at evaluation point", x=x_prime, target=dist.name)

    if dist.is_lattice:
        left_over_p = dist.left_mass(ell, x_prime, exact) / p_prime
        upper_over_p = dist.upper_mass(ell, x_prime, exact) / p_prime
        terms = []
        for y in dist.lattice():
            k = (dist.left_mass(ell, y, exact) * upper_over_p if y <= x_prime
                 else left_over_p * dist.upper_mass(ell, y, exact))
            terms.append(k * delta(-ell, h, y, cfg) if k != 0 else k)
        return lattice_sum(terms).value

    # masses are divided by p(x') inside the integrands to keep them O(1) in the tails
    derivative = lambda y: h.derivative_at(y, cfg)
    points = h.breakpoints + dist.quad_breakpoints()
    left = integrate(lambda y: dist.left_mass(0, y) / p_prime * derivative(y),
                     dist.support.restrict(upper=x_prime), cfg, points)
    right = integrate(lambda y: dist.upper_mass(0, y) / p_prime * derivative(y),
                      dist.support.restrict(lower=x_prime), cfg, points)
    return left.value * dist.upper_mass(0, x_prime) + dist.left_mass(0, x_prime) * right.value


def inverse_via_double(dist: TargetDistribution, ell: int, h, x, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """−L^ℓ h(x) = E[(h(X₂) − h(X₁)) Φ^ℓ(X₁, x, X₂)]

    Lattice targets use the double sum over the support; Lebesgue targets split the
    double integral into products of one-dimensional tail integrals.
    """
    ell = check_shift(dist, ell)
    h = as_test_function(h)
    exact = dist.use_exact(cfg)

    if dist.is_lattice:
        px = dist.pdf(x, exact)
        if px == 0:
            raise ZeroDensity("mass vanishes at evaluation point", x=x, target=dist.name)
        points = list(dist.lattice())
        firsts = [(y, dist.pdf(y, exact)) for y in points if chi(ell, y, x)]
        seconds = [(y, dist.pdf(y, exact)) for y in points if chi(-ell, x, y)]
        total = lattice_sum((h(y2) - h(y1)) * p1 * p2 for y1, p1 in firsts for y2, p2 in seconds)
        return total.value / px

    points = h.breakpoints
    above = tail_ratio(dist, h, x, True, cfg, points).value
    below = tail_ratio(dist, h, x, False, cfg, points).value
    return dist.left_mass(0, x) * above - dist.upper_mass(0, x) * below
