import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import special

from distribution import TargetDistribution
from numerics import (
    DEFAULT_QUADRATURE,
    InvalidParameter,
    QuadratureConfig,
    ZeroDensity,
    tolerance_for,
)
from representations import kernel_K
from stein_ops import as_test_function, check_shift, pseudo_inverse, solve_stein_equation

logger = logging.getLogger(__name__)

DEFAULT_PAIRS = 1000
SUP_GRID_POINTS = 2001
SQRT_HALF_PI = math.sqrt(math.pi / 2.0)


def factor_R(dist: TargetDistribution, ell: int, x, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """R^ℓ(x) = E[χ^ℓ(X, x)]·E[χ^{−ℓ}(x, X)]/p(x) = K^ℓ(x, x)/p(x)"""
    ell = check_shift(dist, ell)
    exact = dist.use_exact(cfg)
    px = dist.pdf(x, exact)
    if px == 0:
        raise ZeroDensity("Stein factor needs a positive density", x=x, target=dist.name)
    kernel = kernel_K(dist, ell, x, x, cfg)
    if dist.is_lattice:
        return kernel / px
    if kernel <= 0:
        return 0.0
    # far tails: both factors underflow together
    return math.exp(math.log(kernel) - dist.log_pdf(x))


@dataclass(frozen=True)
class FactorProfile:
    """R^ℓ on an evaluation grid"""

    eval: Callable
    grid: List[float]
    values: List[float]
    sup_on_grid: float
    argmax: float

    def to_dict(self) -> Dict:
        return {
            'grid': self.grid,
            'values': self.values,
            'sup_on_grid': self.sup_on_grid,
            'argmax': self.argmax,
        }


def factor_profile(dist: TargetDistribution, ell: int, grid: Optional[Sequence[float]] = None,
                   cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> FactorProfile:
    ell = check_shift(dist, ell)
    xs = [float(x) for x in (dist.grid(50) if grid is None else grid) if dist.in_support(x)]
    if not xs:
        raise InvalidParameter("evaluation grid misses the support", target=dist.name)
    values = [float(factor_R(dist, ell, int(x) if dist.is_lattice else x, cfg)) for x in xs]
    best = int(np.argmax(values))
    return FactorProfile(lambda x: factor_R(dist, ell, x, cfg), xs, values, values[best], xs[best])


def sup_norm(dist: TargetDistribution, h) -> float:
    """‖h‖∞ on the support: the declared bound, else the max over the (truncated) support"""
    h = as_test_function(h)
    if h.sup_norm is not None:
        return float(h.sup_norm)
    if dist.is_lattice:
        return max(abs(float(h(k))) for k in dist.lattice())
    lo, hi = dist.support.lower, dist.support.upper
    grid_lo, grid_hi = dist.grid(2)[0], dist.grid(2)[-1]
    lo = lo if math.isfinite(lo) else grid_lo - 2.0 * dist.std
    hi = hi if math.isfinite(hi) else grid_hi + 2.0 * dist.std
    xs = np.concatenate([np.linspace(lo, hi, SUP_GRID_POINTS), [b for b in h.breakpoints if lo <= b <= hi]])
    return float(max(abs(float(h(x))) for x in xs))


@dataclass(frozen=True)
class InverseBoundCheck:
    x: float
    lhs: float
    rhs: float
    sup_norm: float
    holds: bool

    def to_dict(self) -> Dict:
        return asdict(self)


def inverse_bound_check(dist: TargetDistribution, ell: int, h, x,
                        cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> InverseBoundCheck:
    """|L^ℓ h(x)| ≤ 2‖h‖∞ R^ℓ(x)"""
    ell = check_shift(dist, ell)
    h = as_test_function(h)
    norm = sup_norm(dist, h)
    lhs = abs(pseudo_inverse(dist, ell, h, cfg)(x))
    rhs = 2 * factor_R(dist, ell, x, cfg) * (norm if not dist.use_exact(cfg) else Fraction(norm))
    holds = lhs <= rhs if dist.use_exact(cfg) else lhs <= rhs + tolerance_for(1e-9 * max(1.0, float(rhs)))
    return InverseBoundCheck(float(x), float(lhs), float(rhs), norm, bool(holds))


@dataclass(frozen=True)
class LipschitzCheck:
    x: float
    g_value: float
    k: float
    bound_ok: bool
    domination_ok: bool

    def to_dict(self) -> Dict:
        return asdict(self)


def lipschitz_domination(dist: TargetDistribution, h, eta, k: float, seed: int = 0,
                         pairs: int = DEFAULT_PAIRS) -> bool:
    """Spot check of |h(x) − h(y)| ≤ k|η(x) − η(y)| on sampled pairs"""
    h, eta = as_test_function(h), as_test_function(eta)
    rng = np.random.default_rng(seed)
    xs, ys = dist.sample(pairs, rng), dist.sample(pairs, rng)
    for x, y in zip(xs, ys):
        x, y = _native(dist, x), _native(dist, y)
        if abs(h(x) - h(y)) > k * abs(eta(x) - eta(y)) + 1e-12:
            logger.warning("Lipschitz domination fails at (%s, %s) for %s", x, y, h.label)
            return False
    return True


def lipschitz_solution_bound(dist: TargetDistribution, ell: int, h, eta, k: float, x,
                             cfg: QuadratureConfig = DEFAULT_QUADRATURE, seed: int = 0) -> LipschitzCheck:
    """|g(x)| ≤ k for g = L h / L η when h is k-Lipschitz relative to η"""
    ell = check_shift(dist, ell)
    g = solve_stein_equation(dist, ell, h, eta, cfg)
    value = g(x)
    domination = lipschitz_domination(dist, h, eta, k, seed)
    return LipschitzCheck(float(x), float(value), float(k),
                          bool(abs(float(value)) <= k + tolerance_for(1e-9 * max(1.0, k))), domination)


@dataclass(frozen=True)
class MillsBounds:
    """Gaussian Mills ratio r = (1 − Φ)/φ and the factor R = Φ·r with their elementary bounds"""

    x: float
    lower1: float
    half_r: float
    R: float
    r: float
    upper: float
    holds: bool = field(default=True)

    def to_dict(self) -> Dict:
        return asdict(self)


def mills_bounds_gaussian(x: float) -> MillsBounds:
    """1/(√(x²+4)+x) ≤ r/2 ≤ R ≤ r ≤ 4/(√(x²+8)+3x) for x ≥ 0"""
    if x < 0:
        raise InvalidParameter("Mills bounds are stated for x >= 0", x=x)
    r = SQRT_HALF_PI * float(special.erfcx(x / math.sqrt(2.0)))
    factor = float(special.ndtr(x)) * r
    lower1 = 1.0 / (math.sqrt(x * x + 4.0) + x)
    upper = 4.0 / (math.sqrt(x * x + 8.0) + 3.0 * x)
    chain = [lower1, r / 2.0, factor, r, upper]
    holds = all(a <= b * (1 + 1e-12) for a, b in zip(chain, chain[1:]))
    return MillsBounds(float(x), lower1, r / 2.0, factor, r, upper, holds)


def _native(dist: TargetDistribution, x):
    return int(round(float(x))) if dist.is_lattice else float(x)


def monotone_direction(h, dist: TargetDistribution, seed: int = 0, pairs: int = DEFAULT_PAIRS) -> Optional[int]:
    """+1 if h is nondecreasing on sampled pairs, −1 if nonincreasing, 0 if constant, None if neither"""
    h = as_test_function(h)
    rng = np.random.default_rng(seed)
    xs, ys = dist.sample(pairs, rng), dist.sample(pairs, rng)
    up = down = False
    for x, y in zip(xs, ys):
        x, y = _native(dist, x), _native(dist, y)
        if x == y:
            continue
        slope = (float(h(y)) - float(h(x))) * (y - x)
        up = up or slope > 0
        down = down or slope < 0
    if up and down:
        logger.warning("%s is not monotone on sampled pairs", h.label)
        return None
    return 1 if up else -1 if down else 0


def sign_constancy_check(dist: TargetDistribution, ell: int, h, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                         seed: int = 0, grid: Optional[Sequence[float]] = None) -> bool:
    """True iff L^ℓ h keeps one sign on a dense grid of the support"""
    ell = check_shift(dist, ell)
    h = as_test_function(h)
    if monotone_direction(h, dist, seed) is None:
        logger.warning("sign constancy checked for a non-monotone %s", h.label)
    inverse = pseudo_inverse(dist, ell, h, cfg)
    xs = list(dist.lattice()) if grid is None and dist.is_lattice else (dist.grid(200) if grid is None else grid)
    values = [float(inverse(_native(dist, x))) for x in xs if dist.in_support(x)]
    tol = tolerance_for(1e-9 * max([1.0] + [abs(v) for v in values]))
    return all(v <= tol for v in values) or all(v >= -tol for v in values)
