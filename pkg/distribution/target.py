import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from numerics import (
    DEFAULT_QUADRATURE,
    IntegrationResult,
    InvalidParameter,
    MeasureKind,
    NotNormalized,
    QuadratureConfig,
    SteinError,
    SupportSpec,
    integrate,
    is_exact_number,
    lattice_sum,
)

logger = logging.getLogger(__name__)

GRID_SPREAD = 4.0  # standard deviations covered by grids on unbounded supports
SAMPLER_GRID_POINTS = 4001


@dataclass(frozen=True, eq=False)
class TargetDistribution:
    """One univariate target: density, cdf, moments and a seeded sampler.

    Immutable after construction. ``sf`` is the strict survival P(X > x); the
    ``exact_*`` members are present only for lattice targets with rational masses.
    """

    name: str
    support: SupportSpec
    density: Callable[[float], float]
    cdf: Callable[[float], float]
    mean: float
    variance: float
    sampler: Callable[[int, np.random.Generator], np.ndarray]
    derivative_of_density: Optional[Callable[[float], float]] = None
    sf: Optional[Callable[[float], float]] = None
    log_density: Optional[Callable[[float], float]] = None
    score: Optional[Callable[[float], float]] = None
    exact_density: Optional[Callable[[int], Fraction]] = None
    exact_cdf: Optional[Callable[[int], Fraction]] = None
    exact_mean: Optional[Fraction] = None
    family: Optional[BaseModel] = None
    kinks: Tuple[float, ...] = ()
    params: Dict = field(default_factory=dict)

    @property
    def measure(self) -> MeasureKind:
        return self.support.measure

    @property
    def is_lattice(self) -> bool:
        return self.support.is_lattice

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    @property
    def supports_exact(self) -> bool:
        return self.exact_density is not None and self.exact_cdf is not None

    def use_exact(self, cfg: QuadratureConfig) -> bool:
        return cfg.exact and self.supports_exact

    def lattice(self) -> range:
        return self.support.points()

    def in_support(self, x) -> bool:
        return self.support.contains(x)

    def pdf(self, x, exact: bool = False):
        """Density with zero extension outside the support"""
        if not self.support.contains(x):
            return 0 if exact else 0.0
        if exact:
            return self.exact_density(int(x))
        return self.density(x)

    def log_pdf(self, x) -> float:
        if self.log_density is not None:
            return self.log_density(x) if self.support.contains(x) else -math.inf
        d = self.pdf(x)
        return math.log(d) if d > 0 else -math.inf

    def cdf_at(self, x, exact: bool = False):
        if exact:
            return self.exact_cdf(math.floor(x))
        return self.cdf(x)

    def survival(self, x, exact: bool = False):
        """P(X > x)"""
        if exact:
            return 1 - self.exact_cdf(math.floor(x))
        if self.sf is not None:
            return self.sf(x)
        return 1.0 - self.cdf(x)

    def left_mass(self, ell: int, x, exact: bool = False):
        """E[χ^ℓ(X, x)] = P(X ≤ x − ℓ(ℓ+1)/2)"""
        return self.cdf_at(x - ell * (ell + 1) // 2, exact)

    def upper_mass(self, ell: int, x, exact: bool = False):
        """1 − left_mass, from the survival function"""
        return self.survival(x - ell * (ell + 1) // 2, exact)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return self.sampler(size, rng)

    def quad_breakpoints(self) -> Tuple[float, ...]:
        pts = list(self.kinks)
        if math.isfinite(self.mean):
            pts.append(self.mean)
        return tuple(pts)

    def integrate(self, fn: Callable, cfg: QuadratureConfig = DEFAULT_QUADRATURE, breakpoints: Sequence[float] = (),
                  support: Optional[SupportSpec] = None) -> IntegrationResult:
        """∫ fn dμ over the support (or a restriction of it); density not included"""
        sup = self.support if support is None else support
        return integrate(fn, sup, cfg, tuple(breakpoints) + self.quad_breakpoints())

    def expect(self, fn: Callable, cfg: QuadratureConfig = DEFAULT_QUADRATURE, breakpoints: Sequence[float] = (),
               support: Optional[SupportSpec] = None) -> IntegrationResult:
        """E[fn(X)] (restricted to ``support`` when given); exact when cfg.exact allows it"""
        sup = self.support if support is None else support
        if sup is None:
            return IntegrationResult(0, 0.0)
        if self.is_lattice:
            exact = self.use_exact(cfg)
            return lattice_sum(_weighted(fn, k, self.pdf(k, exact)) for k in sup.points())
        return integrate(lambda x: _weighted(fn, x, self.density(x)), sup, cfg,
                         tuple(breakpoints) + self.quad_breakpoints())

    def grid(self, n: int = 20) -> np.ndarray:
        """Interior evaluation grid covering the bulk of the distribution"""
        if self.is_lattice:
            return self.support.grid(n)
        lo, hi = self.support.lower, self.support.upper
        if not math.isfinite(lo):
            lo = self.mean - GRID_SPREAD * self.std
        if not math.isfinite(hi):
            hi = self.mean + GRID_SPREAD * self.std
        width = hi - lo
        return np.linspace(lo + 0.02 * width, hi - 0.02 * width, n)

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'support': self.support.to_dict(),
            'mean': float(self.mean),
            'variance': float(self.variance),
            'exact': self.supports_exact,
            'params': dict(self.params),
        }


def _weighted(fn: Callable, x, weight):
    if weight == 0:
        return 0 if is_exact_number(weight) else 0.0
    return fn(x) * weight


class DistributionDiagnostics(BaseModel):
    name: str
    normalization_error: float
    not_normalized: bool
    mean_error: float
    cdf_monotonicity_violations: int
    cdf_accumulation_error: float
    cdf_endpoint_error: float
    support_consistent: bool
    grid_points: int
    errors: List[Dict] = []


def validate(dist: TargetDistribution, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> DistributionDiagnostics:
    """Check normalization, mean, cdf accumulation and support consistency"""
    errors = []
    try:
        mass = float(dist.integrate(dist.pdf, cfg).value)
        first = float(dist.integrate(lambda x: x * dist.pdf(x), cfg).value)
    except SteinError as exc:
        errors.append(exc.to_dict())
        mass, first = math.nan, math.nan
    normalization_error = abs(mass - 1.0)
    mean_error = abs(first - dist.mean) if math.isfinite(first) else math.inf

    if dist.is_lattice:
        grid = np.array(list(dist.lattice()), dtype=float)
        running = np.cumsum([dist.pdf(k) for k in dist.lattice()])
        accumulated = running + float(dist.cdf_at(grid[0] - 1))
    else:
        grid = dist.grid(120)
        accumulated = _accumulate_density(dist, grid, cfg, errors)
    cdf_values = np.array([float(dist.cdf_at(x)) for x in grid])
    violations = int(np.sum(np.diff(cdf_values) < -1e-15))
    accumulation_error = float(np.max(np.abs(cdf_values - accumulated))) if len(grid) else 0.0

    lo, hi = dist.support.effective_bounds()
    endpoint_error = 0.0
    if math.isfinite(lo):
        endpoint_error = max(endpoint_error, abs(float(dist.cdf_at(lo - 1 if dist.is_lattice else lo))))
    if math.isfinite(hi):
        endpoint_error = max(endpoint_error, abs(1.0 - float(dist.cdf_at(hi))))

    outside = []
    if math.isfinite(dist.support.lower):
        outside.append(dist.support.lower - 1.0)
    if math.isfinite(dist.support.upper):
        outside.append(dist.support.upper + 1.0)
    consistent = all(dist.pdf(x) == 0 for x in outside) and all(dist.pdf(x) > 0 for x in grid)

    return DistributionDiagnostics(
        name=dist.name,
        normalization_error=normalization_error,
        not_normalized=not normalization_error <= cfg.normalization_tol,
        mean_error=mean_error,
        cdf_monotonicity_violations=violations,
        cdf_accumulation_error=accumulation_error,
        cdf_endpoint_error=endpoint_error,
        support_consistent=consistent,
        grid_points=len(grid),
        errors=errors,
    )


def _accumulate_density(dist: TargetDistribution, grid: np.ndarray, cfg: QuadratureConfig, errors: List) -> np.ndarray:
    acc = np.empty(len(grid))
    try:
        head = dist.support.restrict(upper=grid[0])
        running = float(dist.integrate(dist.pdf, cfg, support=head).value)
        acc[0] = running
        for i in range(1, len(grid)):
            piece = dist.support.restrict(grid[i - 1], grid[i])
            running += float(dist.integrate(dist.pdf, cfg, support=piece).value)
            acc[i] = running
    except SteinError as exc:
        errors.append(exc.to_dict())
        acc[:] = math.nan
    return acc


def make_custom(support: SupportSpec, density: Callable, cdf: Optional[Callable] = None,
                derivative: Optional[Callable] = None, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                name: str = "custom", strict: bool = True) -> TargetDistribution:
    """Target from a user density; cdf and moments filled in numerically.

    With ``strict`` the mass is required to be 1 within ``cfg.normalization_tol``;
    ``strict=False`` builds the object anyway so that ``validate`` can report on it.
    """
    if support.is_lattice:
        return _make_custom_lattice(support, density, cdf, cfg, name, strict)

    mass = float(integrate(density, support, cfg).value)
    _check_mass(mass, cfg, strict, name)
    mean = float(integrate(lambda x: x * density(x), support, cfg).value)
    variance = float(integrate(lambda x: (x - mean) ** 2 * density(x), support, cfg, (mean,)).value)

    if cdf is None:
        cdf = _quadrature_cdf(support, density, cfg, mean)
    lo, hi = support.lower, support.upper

    def clipped_cdf(x):
        if x <= lo:
            return 0.0
        if x >= hi:
            return 1.0
        return cdf(x)

    score = None
    if derivative is not None:
        def score(x):
            d = density(x)
            return derivative(x) / d if d > 0 else 0.0

    def log_density(x):
        d = density(x)
        return math.log(d) if d > 0 else -math.inf

    spread = math.sqrt(variance) if variance > 0 else 1.0
    sampler = _inverse_cdf_sampler(support, clipped_cdf, mean, spread)
    logger.debug("custom target %s: mass %.3e, mean %.6g, variance %.6g", name, mass, mean, variance)
    return TargetDistribution(
        name=name, support=support, density=density, cdf=clipped_cdf, mean=mean, variance=variance,
        sampler=sampler, derivative_of_density=derivative, log_density=log_density, score=score,
        params={'mass': mass},
    )


def _make_custom_lattice(support, density, cdf, cfg, name, strict) -> TargetDistribution:
    if not support.is_finite and (support.cut_lower is None or support.cut_upper is None):
        raise InvalidParameter("custom lattice targets need a finite or truncated support", name=name)
    lo, hi = support.effective_bounds()
    points = list(range(lo, hi + 1))
    masses = [density(k) for k in points]
    if any(m < 0 for m in masses):
        raise InvalidParameter("density must be nonnegative", name=name)
    exact = all(is_exact_number(m) for m in masses)
    mass = sum(masses) if exact else math.fsum(float(m) for m in masses)
    _check_mass(float(mass), cfg, strict, name)

    running, cumulative = 0, []
    for m in masses:
        running = running + m
        cumulative.append(running)
    exact_table = cumulative if exact else None
    float_table = [float(c) for c in cumulative]
    mean = math.fsum(k * float(m) for k, m in zip(points, masses))
    variance = math.fsum((k - mean) ** 2 * float(m) for k, m in zip(points, masses))

    lookup = dict(zip(points, masses))
    float_cdf = cdf or _step_lookup(float_table, lo, 0.0, float_table[-1])

    def float_density(x):
        return float(lookup.get(int(x), 0.0)) if x == math.floor(x) else 0.0

    probs = np.array([float(m) for m in masses])
    probs = probs / probs.sum()

    def sampler(size, rng):
        return rng.choice(np.array(points, dtype=float), size=size, p=probs)

    return TargetDistribution(
        name=name, support=support, density=float_density, cdf=float_cdf, mean=mean, variance=variance,
        sampler=sampler,
        sf=lambda x: float_table[-1] - float_cdf(x),
        exact_density=(lambda k: lookup.get(k, 0)) if exact else None,
        exact_cdf=_step_lookup(exact_table, lo, 0, exact_table[-1]) if exact else None,
        exact_mean=sum(k * m for k, m in zip(points, masses)) if exact else None,
        params={'mass': float(mass)},
    )


def make_custom_from_table(support: SupportSpec, table: Sequence[Tuple[float, float]],
                           cfg: QuadratureConfig = DEFAULT_QUADRATURE, name: str = "table",
                           strict: bool = True) -> TargetDistribution:
    """Target from (x, p(x)) pairs: point masses on a lattice, piecewise-linear otherwise"""
    if not table:
        raise InvalidParameter("density table is empty", name=name)
    if support.is_lattice:
        lookup = {int(x): p for x, p in table}
        return make_custom(support, lambda k: lookup.get(int(k), 0), cfg=cfg, name=name, strict=strict)
    xs = np.array([float(x) for x, _ in table])
    ps = np.array([float(p) for _, p in table])
    order = np.argsort(xs)
    xs, ps = xs[order], ps[order]

    def density(x):
        if not support.lower <= x <= support.upper:
            return 0.0
        return float(np.interp(x, xs, ps, left=0.0, right=0.0))

    return make_custom(support, density, cfg=cfg, name=name, strict=strict)


def _check_mass(mass: float, cfg: QuadratureConfig, strict: bool, name: str):
    if strict and not abs(mass - 1.0) <= cfg.normalization_tol:
        raise NotNormalized("density does not integrate to one", name=name, mass=mass)


def _step_lookup(table, lo: int, below, above):
    hi = lo + len(table) - 1

    def fn(x):
        k = math.floor(x)
        if k < lo:
            return below
        if k > hi:
            return above
        return table[k - lo]

    return fn


def _quadrature_cdf(support: SupportSpec, density: Callable, cfg: QuadratureConfig, center: float):
    @lru_cache(maxsize=4096)
    def cdf(x: float) -> float:
        # integrate over the shorter side of the center
        if x > center:
            return 1.0 - float(integrate(density, support.restrict(lower=x), cfg).value)
        return float(integrate(density, support.restrict(upper=x), cfg).value)

    return cdf


def _inverse_cdf_sampler(support: SupportSpec, cdf: Callable, mean: float, spread: float):
    lo = support.lower if math.isfinite(support.lower) else mean - 12.0 * spread
    hi = support.upper if math.isfinite(support.upper) else mean + 12.0 * spread
    table: List[np.ndarray] = []

    def sampler(size, rng):
        if not table:
            xs = np.linspace(lo, hi, SAMPLER_GRID_POINTS)
            cs = np.maximum.accumulate(np.array([cdf(x) for x in xs]))
            table.extend([xs, cs])
        xs, cs = table
        u = rng.random(size) * (cs[-1] - cs[0]) + cs[0]
        return np.interp(u, cs, xs)

    return sampler
