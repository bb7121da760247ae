import logging
from typing import Callable, Optional

from distribution import TargetDistribution
from numerics import (
    DEFAULT_QUADRATURE,
    DegenerateDenominator,
    QuadratureConfig,
    SignViolation,
    SteinError,
    error_entry,
    tolerance_for,
)
from representations import covariance
from stein_ops import (
    TestFunction,
    as_test_function,
    canonical_op,
    check_shift,
    delta,
    identity,
    partial_moment,
    pseudo_inverse,
)

from .gamma import gamma_density
from .reports import BoundReport, Tolerances

logger = logging.getLogger(__name__)

SIGN_TOLERANCE = 1e-12


def oracle_variance(dist: TargetDistribution, g, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Var[g(X)]: exact sum, truncated sum or adaptive quadrature"""
    return covariance(dist, g, g, cfg).value


def default_c(dist: TargetDistribution, ell: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> TestFunction:
    """c = L^ℓ(Id − μ)"""
    return pseudo_inverse(dist, ell, identity(), cfg).as_test_function()


def klaassen_lower(dist: TargetDistribution, ell: int, f, c=None, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """E[c Δ^{−ℓ}f]² / E[(T^ℓ c)²]"""
    ell = check_shift(dist, ell)
    f = as_test_function(f)
    c = default_c(dist, ell, cfg) if c is None else as_test_function(c)
    transformed = canonical_op(dist, ell, c, cfg)
    points = f.breakpoints + c.breakpoints
    numerator = dist.expect(lambda x: c(x) * delta(-ell, f, x, cfg), cfg, points)
    denominator = dist.expect(lambda x: transformed(x) ** 2, cfg, points)
    if abs(float(denominator.value)) <= tolerance_for(denominator.error_estimate, 1e-14):
        raise DegenerateDenominator("E[(T c)^2] vanishes", c=c.label, target=dist.name)
    return numerator.value ** 2 / denominator.value


def upper_weight(dist: TargetDistribution, ell: int, h: Optional[TestFunction],
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> Callable:
    """x ↦ p(x)·(−L^ℓ h(x))/Δ^{−ℓ}h(x); Γ_1 in closed form when h is the identity"""
    if h is None or h.is_identity:
        return gamma_density(dist, [ell], 1, cfg)

    def weight(x):
        step = delta(-ell, h, x, cfg)
        moment = -partial_moment(dist, ell, h, x, cfg)
        if step == 0:
            if moment == 0:
                return 0
            raise DegenerateDenominator("difference of h vanishes", x=x, h=h.label)
        return moment / step

    return weight


def check_weight_sign(dist: TargetDistribution, weight: Callable, label: str):
    xs = list(dist.lattice()) if dist.is_lattice else dist.grid(60)
    for x in xs:
        w = float(weight(x))
        if w < -SIGN_TOLERANCE * max(1.0, float(dist.pdf(x))):
            raise SignViolation("upper-bound weight is negative", x=float(x), weight=w, h=label)


def klaassen_upper(dist: TargetDistribution, ell: int, f, h=None, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """E[(Δ^{−ℓ}f)²·(−L^ℓ h)/Δ^{−ℓ}h]"""
    ell = check_shift(dist, ell)
    f = as_test_function(f)
    h = None if h is None else as_test_function(h)
    weight = upper_weight(dist, ell, h, cfg)
    check_weight_sign(dist, weight, "id" if h is None else h.label)
    points = f.breakpoints + (h.breakpoints if h else ())
    return dist.integrate(lambda x: delta(-ell, f, x, cfg) ** 2 * weight(x), cfg, points).value


def klaassen_bounds(dist: TargetDistribution, ell: int, f, c=None, h=None,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> BoundReport:
    """Lower and upper bounds with the oracle variance; equality flagged when they meet"""
    ell = check_shift(dist, ell)
    f = as_test_function(f)
    variance = float(oracle_variance(dist, f, cfg))
    errors = []
    lower = upper = None
    try:
        lower = float(klaassen_lower(dist, ell, f, c, cfg))
    except SteinError as exc:
        logger.warning("lower bound unavailable: %s", exc)
        errors.append(error_entry(exc, "klaassen_lower"))
    try:
        upper = float(klaassen_upper(dist, ell, f, h, cfg))
    except SteinError as exc:
        logger.warning("upper bound unavailable: %s", exc)
        errors.append(error_entry(exc, "klaassen_upper"))

    tol = tolerance_for(1e-9 * max(1.0, abs(variance)))
    return BoundReport(
        distribution=dist.name,
        function=f.label,
        ell=ell,
        lower=lower,
        upper=upper,
        oracle_variance=variance,
        equality=lower is not None and upper is not None and abs(lower - upper) <= tol,
        lower_ok=lower is None or lower <= variance + tol,
        upper_ok=upper is None or upper >= variance - tol,
        tolerances=Tolerances(lower=tol, upper=tol),
        errors=errors,
    )
