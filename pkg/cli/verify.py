import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from bounds import (
    family_gamma,
    gamma_density,
    klaassen_bounds,
    matrix_cs_residual,
    olkin_shepp,
    variance_expansion,
)
from distribution import (
    BetaFamily,
    BinomialFamily,
    GammaFamily,
    HypergeometricFamily,
    LaplaceFamily,
    NormalFamily,
    PoissonFamily,
    TargetDistribution,
    make_builtin,
)
from numerics import DEFAULT_QUADRATURE, QuadratureConfig, SteinError, error_entry, min_eigenvalue
from representations import (
    cov_via_inverse,
    cov_via_kernel,
    direct_covariance,
    inverse_via_double,
    inverse_via_kernel,
    kernel_matrix,
    natural_gradient_identity,
)
from stein_factors import factor_R, inverse_bound_check, mills_bounds_gaussian
from stein_ops import (
    constant,
    exponential,
    identity,
    indicator_le,
    polynomial,
    power,
    pseudo_inverse,
    sine,
    smoothed_indicator,
    stein_kernel,
)

from .spec import PropertyResult, VerifyReport

logger = logging.getLogger(__name__)

EXACT = QuadratureConfig(exact=True)
NORMAL_R0 = 0.25 * np.sqrt(2.0 * np.pi)


def _targets(quick: bool) -> List[Tuple[TargetDistribution, QuadratureConfig]]:
    families = [
        (NormalFamily(mu=0.0, sigma2=1.0), DEFAULT_QUADRATURE),
        (BetaFamily(alpha=2.0, beta=3.0), DEFAULT_QUADRATURE),
        (BinomialFamily(n=10, p=0.5), EXACT),
        (PoissonFamily(lam=3.0), DEFAULT_QUADRATURE),
    ]
    if not quick:
        families += [
            (GammaFamily(alpha=1.3, beta=2.4), DEFAULT_QUADRATURE),
            (LaplaceFamily(), DEFAULT_QUADRATURE),
            (BinomialFamily(n=20, p=0.2), DEFAULT_QUADRATURE),
            (HypergeometricFamily(N=50, K=10, n=8), EXACT),
        ]
    return [(make_builtin(fam, cfg), cfg) for fam, cfg in families]


def _shifts(dist: TargetDistribution) -> Tuple[int, ...]:
    return (-1, 1) if dist.is_lattice else (0,)


def _points(dist: TargetDistribution, n: int) -> List:
    return [int(x) if dist.is_lattice else float(x) for x in dist.grid(n)]


@dataclass
class PropertyTally:
    """Running record of one property: number of checks, worst violation, failures"""

    name: str
    checks: int = 0
    failures: int = 0
    max_violation: float = 0.0
    notes: List[str] = field(default_factory=list)
    errors: List = field(default_factory=list)

    def record(self, ok: bool, violation: float = 0.0, label: str = ""):
        self.checks += 1
        self.max_violation = max(self.max_violation, float(violation))
        if not ok:
            self.failures += 1
            if label and len(self.notes) < 5:
                self.notes.append(label)

    def close(self, tolerance: float, actual: float, label: str):
        ok = abs(actual) <= tolerance
        self.record(ok, abs(actual), label)
        return ok

    def result(self) -> PropertyResult:
        return PropertyResult(name=self.name, passed=self.failures == 0 and not self.errors, checks=self.checks,
                              max_violation=self.max_violation, detail="; ".join(self.notes), errors=self.errors)


def check_stein_kernels(quick: bool, seed: int) -> PropertyResult:
    tally = PropertyTally("closed_form_inverse")
    for dist, cfg in _targets(quick):
        for ell in _shifts(dist):
            closed = family_gamma(dist, [ell], 1, cfg)
            if closed is None:
                continue
            tau = stein_kernel(dist, ell, cfg)
            for x in _points(dist, 20):
                expected = closed(x)
                gap = float(tau(x) - expected)
                tally.close(1e-8 * max(1.0, abs(float(expected))), gap, f"{dist.name} ell={ell} x={x}")
    return tally.result()


def check_three_representations(quick: bool, seed: int) -> PropertyResult:
    tally = PropertyTally("three_representations")
    for dist, cfg in _targets(quick):
        functions = [identity(), power(2), smoothed_indicator(float(dist.mean))]
        for ell in _shifts(dist):
            for h in functions:
                inverse = pseudo_inverse(dist, ell, h, cfg)
                for x in _points(dist, 6 if quick else 20):
                    value = float(inverse(x))
                    via_kernel = -float(inverse_via_kernel(dist, ell, h, x, cfg))
                    via_double = -float(inverse_via_double(dist, ell, h, x, cfg))
                    gap = max(abs(value - via_kernel), abs(value - via_double))
                    tally.close(1e-6 * max(1.0, abs(value)), gap, f"{dist.name} {h.label} x={x}")
    return tally.result()


def check_klaassen(quick: bool, seed: int) -> PropertyResult:
    tally = PropertyTally("klaassen_sandwich")
    for dist, cfg in _targets(quick):
        functions = [identity(), power(2), exponential(-1.0), smoothed_indicator(float(dist.mean))]
        for ell in _shifts(dist):
            for f in functions:
                report = klaassen_bounds(dist, ell, f, cfg=cfg)
                lower = report.oracle_variance if report.lower is None else report.lower
                upper = report.oracle_variance if report.upper is None else report.upper
                slack = max(lower - report.oracle_variance, report.oracle_variance - upper, 0.0)
                tally.record(report.lower_ok and report.upper_ok and not report.errors, slack,
                             f"{dist.name} ell={ell} f={f.label}")
    return tally.result()


def check_gamma_closed_forms(quick: bool, seed: int) -> PropertyResult:
    tally = PropertyTally("gamma_closed_forms")
    for dist, cfg in _targets(quick):
        patterns = [[-1, -1], [-1, 1], [1, -1], [1, 1]] if dist.is_lattice else [[0, 0]]
        for ells in patterns:
            for k in (1, 2):
                if family_gamma(dist, ells, k, cfg) is None:
                    continue
                closed = gamma_density(dist, ells, k, cfg, method="family")
                lemma = gamma_density(dist, ells, k, cfg, method="lemma")
                points = _points(dist, 8 if quick else 20)
                scale = max([1e-300] + [abs(float(closed(x))) for x in points])
                for x in points:
                    gap = float(lemma(x) - closed(x)) / scale
                    tally.close(1e-6, gap, f"{dist.name} {ells[:k]} k={k} x={x}")
    return tally.result()


def check_expansion(quick: bool, seed: int) -> PropertyResult:
    tally = PropertyTally("expansion_sandwich")
    normal = make_builtin(NormalFamily(mu=0.0, sigma2=1.0))
    report = variance_expansion(normal, power(4), 4)
    for term, expected in zip(report.terms, (240.0, -216.0, 96.0, -24.0)):
        tally.close(1e-8 * abs(expected), term - expected, "normal x^4 terms")
    tally.close(1e-8 * 96.0, report.partial_sums[-1] - 96.0, "normal x^4 S_4")
    for fam in (NormalFamily(mu=0.0, sigma2=1.0), GammaFamily(alpha=1.3, beta=2.4), BetaFamily(alpha=2.0, beta=3.0)):
        dist = make_builtin(fam)
        for degree in range(1, 5):
            g = polynomial([1, -2, 1, 1, 1][:degree + 1])
            exact = variance_expansion(dist, g, degree)
            tally.close(1e-8 * max(1.0, exact.oracle_variance), exact.partial_sums[-1] - exact.oracle_variance,
                        f"{dist.name} degree {degree}")
    for dist, cfg in _targets(quick):
        for ells in ([[-1, -1], [-1, 1], [1, -1], [1, 1]] if dist.is_lattice else [[0, 0]]):
            for g in (power(2), exponential(-1.0)):
                expansion = variance_expansion(dist, g, 2, ells, cfg)
                violation = max([0.0] + [(-1) ** (m + 1) * (expansion.oracle_variance - s)
                                         for m, s in enumerate(expansion.partial_sums, start=1)])
                tally.record(all(expansion.sandwich_ok), violation, f"{dist.name} {ells} {g.label}")
    return tally.result()


def _random_polynomial(rng: np.random.Generator, degree: int = 2):
    coefficients = [int(c) for c in rng.integers(-3, 4, size=degree + 1)]
    if not any(coefficients[1:]):
        coefficients[1] = 1
    return polynomial(coefficients)


def check_olkin_shepp(quick: bool, seed: int) -> PropertyResult:
    tally = PropertyTally("olkin_shepp")
    rng = np.random.default_rng(seed)
    pairs = 3 if quick else 50
    for dist, cfg in _targets(quick):
        ell = _shifts(dist)[0]
        for _ in range(pairs):
            f, g = _random_polynomial(rng), _random_polynomial(rng)
            report = olkin_shepp(dist, ell, f, g, cfg=cfg)
            violation = max(-report.diff_min_eigenvalue, -report.det_inequality_slack, 0.0)
            tally.record(report.psd_ok and report.det_ok, violation, f"{dist.name} {f.label} / {g.label}")
    return tally.result()


def check_matrix_cs(quick: bool, seed: int) -> PropertyResult:
    tally = PropertyTally("matrix_cauchy_schwarz")
    rng = np.random.default_rng(seed + 1)
    targets = _targets(True)
    for i in range(5 if quick else 20):
        dist, cfg = targets[i % len(targets)]
        ell = _shifts(dist)[i % len(_shifts(dist))]
        points = sorted(rng.choice(_points(dist, 12), size=2, replace=False).tolist())
        a, b, f = (_random_polynomial(rng, 1) for _ in range(3))
        report = matrix_cs_residual(dist, ell, a, b, f, points[0], points[1], cfg)
        tally.record(report.holds, max(report.identity_error, -report.residual_min_eigenvalue, 0.0),
                     f"{dist.name} ({points[0]}, {points[1]})")
    return tally.result()


def check_stein_factors(quick: bool, seed: int) -> PropertyResult:
    tally = PropertyTally("stein_factors")
    normal = make_builtin(NormalFamily(mu=0.0, sigma2=1.0))
    tally.close(1e-4, factor_R(normal, 0, 0.0) - NORMAL_R0, "normal R(0)")
    for x in np.linspace(0.0, 10.0, 20 if quick else 200):
        mills = mills_bounds_gaussian(float(x))
        tally.record(mills.holds, 0.0, f"mills x={x:g}")
    for dist, cfg in _targets(quick):
        mean = float(dist.mean)
        bounded = [constant(1), indicator_le(mean), smoothed_indicator(mean), sine()]
        if not quick:
            bounded += [indicator_le(mean - dist.std), indicator_le(mean + dist.std),
                        smoothed_indicator(mean, 2.0), smoothed_indicator(mean - dist.std),
                        smoothed_indicator(mean + dist.std), constant(-2)]
        for ell in _shifts(dist):
            for h in bounded:
                for x in _points(dist, 5 if quick else 50):
                    check = inverse_bound_check(dist, ell, h, x, cfg)
                    tally.record(check.holds, max(check.lhs - check.rhs, 0.0), f"{dist.name} {h.label} x={x}")
    return tally.result()


def check_kernel_psd(quick: bool, seed: int) -> PropertyResult:
    tally = PropertyTally("kernel_psd")
    for dist, cfg in _targets(quick):
        for ell in _shifts(dist):
            eig = min_eigenvalue(kernel_matrix(dist, ell, _points(dist, 12), cfg))
            tally.record(eig >= -1e-10, max(-eig, 0.0), f"{dist.name} ell={ell}")
    return tally.result()


def check_covariance_identities(quick: bool, seed: int) -> PropertyResult:
    tally = PropertyTally("covariance_identities")
    for dist, cfg in _targets(quick):
        for ell in _shifts(dist):
            for h, g in ((identity(), power(2)), (power(2), exponential(-1.0))):
                direct = float(direct_covariance(dist, h, g, cfg))
                gap = max(abs(float(cov_via_inverse(dist, ell, h, g, cfg)) - direct),
                          abs(float(cov_via_kernel(dist, ell, h, g, cfg)) - direct))
                tally.close(1e-6 * max(1.0, abs(direct)), gap, f"{dist.name} ell={ell} {h.label},{g.label}")
    for fam, cfg in ((BinomialFamily(n=10, p=0.5), EXACT), (PoissonFamily(lam=3.0), DEFAULT_QUADRATURE)):
        check = natural_gradient_identity(make_builtin(fam, cfg), power(3), cfg)
        tally.record(check.holds, abs(check.residual), f"natural gradient {type(fam).__name__}")
    return tally.result()


PROPERTIES: List[Tuple[str, Callable[[bool, int], PropertyResult]]] = [
    ("closed_form_inverse", check_stein_kernels),
    ("three_representations", check_three_representations),
    ("klaassen_sandwich", check_klaassen),
    ("gamma_closed_forms", check_gamma_closed_forms),
    ("expansion_sandwich", check_expansion),
    ("olkin_shepp", check_olkin_shepp),
    ("matrix_cauchy_schwarz", check_matrix_cs),
    ("stein_factors", check_stein_factors),
    ("kernel_psd", check_kernel_psd),
    ("covariance_identities", check_covariance_identities),
]


def run_verify(quick: bool = False, seed: int = 0, only: Optional[List[str]] = None,
               progress: Optional[Callable[[str], None]] = None) -> VerifyReport:
    """Run the property suite; a numeric failure marks its property as failed"""
    start = time.time()
    results = []
    for name, check in PROPERTIES:
        if only and name not in only:
            continue
        if progress:
            progress(name)
        try:
            results.append(check(quick, seed))
        except SteinError as exc:
            logger.warning("property %s raised %s", name, exc)
            results.append(PropertyResult(name=name, passed=False, errors=[error_entry(exc, "verify")]))
    return VerifyReport(quick=quick, seed=seed, properties=results, elapsed_seconds=time.time() - start)
