import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate as sp_integrate

from .domain import SupportSpec
from .errors import NoConvergence, NotIntegrable

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]
Breakpoints = Union[Sequence[float], Callable[[float], Sequence[float]]]

TOLERANCE_FLOOR = 1e-10
PSD_TOLERANCE = 1e-8


class QuadratureConfig(BaseModel):
    """Tolerance policy shared by every integral and sum"""

    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(1e-10, gt=0)
    rel_tol: float = Field(1e-8, gt=0)
    max_subdivisions: int = Field(200, ge=1)
    tail_mass_cut: float = Field(1e-14, gt=0, lt=1)
    exact: bool = False
    finite_differences: bool = True
    fd_step: float = Field(1e-5, gt=0)
    endpoint_offset: float = Field(1e-12, ge=0)
    normalization_tol: float = Field(1e-8, gt=0)
    generic_order_cap: int = Field(3, ge=1)


class MonteCarloConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int = Field(0, ge=0, lt=2 ** 64)
    samples: int = Field(1_000_000, ge=100)
    report_stderr: bool = True


DEFAULT_QUADRATURE = QuadratureConfig()
DEFAULT_MONTE_CARLO = MonteCarloConfig()


@dataclass(frozen=True)
class IntegrationResult:
    value: Number
    error_estimate: float = 0.0

    @property
    def is_exact(self) -> bool:
        return is_exact_number(self.value)

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class MonteCarloResult:
    value: float
    stderr: float
    samples: int

    def to_dict(self):
        return {'value': self.value, 'stderr': self.stderr, 'samples': self.samples}


def is_exact_number(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def tolerance_for(error_estimate: float, floor: float = TOLERANCE_FLOOR) -> float:
    """Comparison tolerance: ten times the integrator estimate, floored"""
    return max(10.0 * abs(error_estimate), floor)


def lattice_sum(values: Iterable[Number]) -> IntegrationResult:
    """Sum that stays rational when every term is rational"""
    values = list(values)
    if all(is_exact_number(v) for v in values):
        return IntegrationResult(sum(values, 0), 0.0)
    floats = [float(v) for v in values]
    if not all(math.isfinite(v) for v in floats):
        raise NotIntegrable("non-finite term in lattice sum")
    total = math.fsum(floats)
    scale = max((abs(v) for v in floats), default=0.0)
    return IntegrationResult(total, len(floats) * np.finfo(float).eps * scale)


def integrate(f: Callable, support: Optional[SupportSpec], cfg: QuadratureConfig = DEFAULT_QUADRATURE,
              breakpoints: Sequence[float] = ()) -> IntegrationResult:
    """Integral of f against the measure of ``support``.

    Counting measure dispatches to a (truncated) lattice sum; Lebesgue measure uses
    adaptive Gauss-Kronrod quadrature split at the given breakpoints. Infinite ranges are
    handled by the quadrature's own variable substitution.
    """
    if support is None:
        return IntegrationResult(0, 0.0)
    if support.is_lattice:
        return lattice_sum(f(k) for k in support.points())

    lo, hi = support.lower, support.upper
    cuts = sorted({float(b) for b in breakpoints if lo < b < hi})
    edges = [lo, *cuts, hi]
    total, error = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        value, err = _quad_piece(f, a, b, cfg)
        total += value
        error += err
    return IntegrationResult(total, error)


def _quad_piece(f: Callable, a: float, b: float, cfg: QuadratureConfig):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sp_integrate.IntegrationWarning)
        out = sp_integrate.quad(lambda x: float(f(x)), a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                                limit=cfg.max_subdivisions, full_output=1)
    value, abserr = out[0], out[1]
    if not math.isfinite(value):
        raise NotIntegrable("integral is not finite", lower=a, upper=b)
    if len(out) > 3:
        message = str(out[3])
        if "divergent" in message:
            raise NotIntegrable("integral appears divergent", lower=a, upper=b, detail=message)
        if abserr > 1e-6 * max(1.0, abs(value)):
            raise NoConvergence("quadrature did not reach tolerance", lower=a, upper=b,
                                error_estimate=abserr, detail=message)
        logger.debug("quad on [%s, %s] accepted with warning: %s (err %.2e)", a, b, message, abserr)
    return value, abserr


def integrate2(f: Callable[[float, float], Number], outer: Optional[SupportSpec],
               inner: Union[Optional[SupportSpec], Callable[[float], Optional[SupportSpec]]],
               cfg: QuadratureConfig = DEFAULT_QUADRATURE, outer_breakpoints: Sequence[float] = (),
               inner_breakpoints: Breakpoints = ()) -> IntegrationResult:
    """Iterated integral ∫∫ f(x, y) dμ(y) dμ(x).

    ``inner`` and ``inner_breakpoints`` may depend on the outer variable. The error is
    the outer estimate plus the largest inner estimate.
    """
    inner_errors = [0.0]

    def outer_integrand(x):
        sup = inner(x) if callable(inner) else inner
        bps = inner_breakpoints(x) if callable(inner_breakpoints) else inner_breakpoints
        res = integrate(lambda y: f(x, y), sup, cfg, bps)
        inner_errors.append(res.error_estimate)
        return res.value

    res = integrate(outer_integrand, outer, cfg, outer_breakpoints)
    return IntegrationResult(res.value, res.error_estimate + max(inner_errors))


def integrate_vec(f: Callable[[float], Sequence[Number]], support: Optional[SupportSpec], size: int,
                  cfg: QuadratureConfig = DEFAULT_QUADRATURE, breakpoints: Sequence[float] = ()):
    """Vector-valued integral; returns (list of values, error estimate)"""
    if support is None:
        return [0] * size, 0.0
    if support.is_lattice:
        columns = list(zip(*(tuple(f(k)) for k in support.points())))
        if not columns:
            return [0] * size, 0.0
        results = [lattice_sum(col) for col in columns]
        return [r.value for r in results], max(r.error_estimate for r in results)

    lo, hi = support.lower, support.upper
    cuts = sorted({float(b) for b in breakpoints if lo < b < hi})
    edges = [lo, *cuts, hi]
    total = np.zeros(size)
    error = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        value, err = sp_integrate.quad_vec(lambda x: np.asarray([float(v) for v in f(x)]), a, b,
                                           epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                                           limit=cfg.max_subdivisions * 50)
        if not np.all(np.isfinite(value)):
            raise NotIntegrable("vector integral is not finite", lower=a, upper=b)
        total += value
        error += float(err)
    return [float(v) for v in total], error


def standard_error(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 2:
        return float("nan")
    return float(np.std(x, ddof=1) / np.sqrt(n))


def mc_expect(f: Callable, dist, arity: int, cfg: MonteCarloConfig = DEFAULT_MONTE_CARLO,
              uniforms: int = 0) -> MonteCarloResult:
    """Seeded Monte Carlo estimate of E[f(X_1, ..., X_arity)] for i.i.d. X_i ~ dist.

    Each argument gets its own stream spawned from the seed; with ``uniforms`` > 0 an
    extra (samples, uniforms) array of U(0,1) draws is passed as the last argument.
    """
    children = np.random.SeedSequence(cfg.seed).spawn(arity + (1 if uniforms else 0))
    args = [np.asarray(dist.sample(cfg.samples, np.random.default_rng(child)), dtype=float)
            for child in children[:arity]]
    if uniforms:
        args.append(np.random.default_rng(children[-1]).random((cfg.samples, uniforms)))
    values = np.broadcast_to(np.asarray(f(*args), dtype=float), (cfg.samples,))
    stderr = standard_error(values) if cfg.report_stderr else float("nan")
    return MonteCarloResult(float(np.mean(values)), stderr, cfg.samples)


def symmetrize(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    return 0.5 * (m + m.T)


def min_eigenvalue(matrix) -> float:
    """Smallest eigenvalue of the symmetrized matrix"""
    return float(np.linalg.eigvalsh(symmetrize(matrix))[0])


def is_psd(matrix, tol: float = PSD_TOLERANCE) -> bool:
    return min_eigenvalue(matrix) >= -tol
