import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from numerics import DEFAULT_QUADRATURE, InvalidParameter, MissingDerivative, QuadratureConfig

logger = logging.getLogger(__name__)


def chi(ell: int, x, y) -> int:
    """χ^ℓ(x, y) = 1[x ≤ y − ℓ(ℓ+1)/2]"""
    return 1 if x <= y - ell * (ell + 1) // 2 else 0


@dataclass(frozen=True)
class TestFunction:
    """Scalar function with optional analytic derivatives, innermost first"""

    __test__ = False

    value: Callable
    derivatives: Tuple[Callable, ...] = ()
    label: str = "f"
    breakpoints: Tuple[float, ...] = ()
    sup_norm: Optional[float] = None
    is_identity: bool = False

    def __call__(self, x):
        return self.value(x)

    @property
    def derivative(self) -> Optional[Callable]:
        return self.derivatives[0] if self.derivatives else None

    def derivative_at(self, x, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
        if self.derivatives:
            return self.derivatives[0](x)
        if not cfg.finite_differences:
            raise MissingDerivative("derivative required", function=self.label, x=x)
        step = cfg.fd_step * max(1.0, abs(x))
        return (self.value(x + step) - self.value(x - step)) / (2.0 * step)

    def differentiated(self, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> "TestFunction":
        if self.derivatives:
            return TestFunction(self.derivatives[0], self.derivatives[1:], f"{self.label}'", self.breakpoints)
        if not cfg.finite_differences:
            raise MissingDerivative("derivative required", function=self.label)
        logger.debug("central differences for %s'", self.label)
        return TestFunction(lambda x: self.derivative_at(x, cfg), (), f"{self.label}'", self.breakpoints)

    def differenced(self, ell: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> "TestFunction":
        """Δ^ℓ of this function as a new TestFunction"""
        if ell == 0:
            return self.differentiated(cfg)
        label = f"Δ{'+' if ell > 0 else '-'}{self.label}"
        return TestFunction(lambda x: delta(ell, self, x, cfg), (), label, self.breakpoints)

    def renamed(self, label: str) -> "TestFunction":
        return replace(self, label=label)


def as_test_function(f, label: str = "f") -> TestFunction:
    if isinstance(f, TestFunction):
        return f
    if callable(f):
        return TestFunction(f, (), label)
    raise InvalidParameter("expected a callable test function", got=type(f).__name__)


def delta(ell: int, f, x, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Forward difference (ℓ=1), backward difference (ℓ=−1) or derivative (ℓ=0)"""
    if ell == 1:
        return f(x + 1) - f(x)
    if ell == -1:
        return f(x) - f(x - 1)
    if ell == 0:
        return as_test_function(f).derivative_at(x, cfg)
    raise InvalidParameter("shift must be -1, 0 or 1", ell=ell)


# Vocabulary


def identity() -> TestFunction:
    return TestFunction(lambda x: x, (lambda x: 1, lambda x: 0), "id", is_identity=True)


def constant(c=1) -> TestFunction:
    return TestFunction(lambda x: c, (lambda x: 0,), f"{c}", sup_norm=abs(float(c)))


def power(k: int) -> TestFunction:
    """x^k with all its derivatives"""
    if k < 0:
        raise InvalidParameter("power must be nonnegative", k=k)
    if k == 1:
        return replace(polynomial([0, 1]), label="id", is_identity=True)
    return polynomial([0] * k + [1]).renamed(f"x^{k}")


def polynomial(coefficients: Sequence) -> TestFunction:
    """Σ c_i x^i; derivatives via numpy.polynomial"""
    poly = np.polynomial.Polynomial(coefficients)
    chain = []
    current = poly
    for _ in range(len(coefficients) + 8):
        current = current.deriv()
        chain.append(_poly_eval(current.coef.tolist()))
    label = " + ".join(f"{c}x^{i}" for i, c in enumerate(coefficients) if c) or "0"
    return TestFunction(_poly_eval(list(coefficients)), tuple(chain), label)


def _poly_eval(coefficients):
    coefficients = [_as_exact(c) for c in coefficients]

    def fn(x):
        total = 0
        for c in reversed(coefficients):
            total = total * x + c
        return total

    return fn


def _as_exact(c):
    if isinstance(c, float) and c.is_integer():
        return int(c)
    return c


def exponential(rate: float = -1.0) -> TestFunction:
    """exp(rate·x)"""
    derivs = tuple((lambda j: (lambda x: rate ** j * math.exp(rate * x)))(j) for j in range(1, 13))
    label = "exp(-x)" if rate == -1.0 else "exp(x)" if rate == 1.0 else f"exp({rate:g}x)"
    return TestFunction(lambda x: math.exp(rate * x), derivs, label)


def sine() -> TestFunction:
    cycle = (math.cos, lambda x: -math.sin(x), lambda x: -math.cos(x), math.sin)
    return TestFunction(math.sin, cycle * 4, "sin", sup_norm=1.0)


def indicator_le(m: float) -> TestFunction:
    """1[x ≤ m]; the attached derivative is the almost-everywhere one"""
    return TestFunction(lambda x: 1 if x <= m else 0, (lambda x: 0,), f"ind<={m:g}", (float(m),), 1.0)


def smoothed_indicator(m: float, width: float = 0.5) -> TestFunction:
    """Logistic step 1/(1 + exp((x − m)/width))"""

    def value(x):
        z = (x - m) / width
        return 0.5 * (1.0 - math.tanh(0.5 * z))

    def first(x):
        s = value(x)
        return -s * (1.0 - s) / width

    def second(x):
        s = value(x)
        return -s * (1.0 - s) * (1.0 - 2.0 * s) / width ** 2

    return TestFunction(value, (first, second), f"smooth<={m:g}", (float(m),), 1.0)


def clipped(c: float) -> TestFunction:
    """min(x, c)"""
    return TestFunction(lambda x: x if x <= c else c, (lambda x: 1 if x < c else 0,), f"min(x,{c:g})", (float(c),))


def half_power() -> TestFunction:
    """2^{−x}, rational at integers"""

    def value(x):
        if isinstance(x, int):
            return Fraction(1, 2 ** x) if x >= 0 else 2 ** (-x)
        return 2.0 ** (-x)

    log2 = math.log(2.0)
    return TestFunction(value, (lambda x: -log2 * 2.0 ** (-x), lambda x: log2 ** 2 * 2.0 ** (-x)), "2^-x")


def table_function(rows: Sequence[Sequence[float]], label: str = "table") -> TestFunction:
    """Piecewise-linear interpolation of (x, f(x)[, f'(x)]) rows"""
    if len(rows) < 2:
        raise InvalidParameter("a function table needs at least two rows")
    data = np.array(sorted(rows, key=lambda r: r[0]), dtype=float)
    xs, fs = data[:, 0], data[:, 1]

    def value(x):
        return float(np.interp(x, xs, fs))

    derivs: Tuple[Callable, ...] = ()
    if data.shape[1] >= 3:
        ds = data[:, 2]
        derivs = (lambda x: float(np.interp(x, xs, ds)),)
    return TestFunction(value, derivs, label, tuple(xs.tolist()), float(np.max(np.abs(fs))))
