import io
import json
import logging
import sys
from typing import Dict, List, Optional

import pandas as pd
from pydantic import BaseModel

from bounds import BoundReport, ExpansionReport, ShiftSequence, klaassen_bounds, variance_expansion
from distribution import TargetDistribution, parse_distribution_spec
from numerics import (
    DEFAULT_QUADRATURE,
    MonteCarloConfig,
    QuadratureConfig,
    SteinError,
    ValidationError,
    error_entry,
)
from representations import kernel_K, kernel_over_density
from stein_factors import factor_R
from stein_ops import check_shift, default_shift

from .spec import GridReport, RunSpec, VerifyReport, parse_function
from .verify import run_verify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PROPERTY_FAILURE = 2
FLOAT_FORMAT = "%.17g"


def status(message: str):
    """Human-readable progress on stderr; stdout carries only the report"""
    print(message, file=sys.stderr)


class SteinBoundsRunner:
    """Command controller: turns a RunSpec into a report and an exit code"""

    def __init__(self, spec: RunSpec):
        self.spec = spec
        self.cfg: QuadratureConfig = DEFAULT_QUADRATURE.model_copy(update={'exact': spec.exact})
        self._dist: Optional[TargetDistribution] = None

    @property
    def dist(self) -> TargetDistribution:
        if self._dist is None:
            self._dist = parse_distribution_spec(self.spec.distribution, self.cfg)
            status(f"🧮 Target: {self._dist.name}")
        return self._dist

    def shift(self) -> int:
        if self.spec.ell is None:
            return int(default_shift(self.dist.measure))
        return check_shift(self.dist, ShiftSequence.parse(self.spec.ell).ells[0])

    def grid(self) -> List:
        if self.spec.grid is None:
            xs = self.dist.grid(41)
        else:
            xs = self.spec.grid.points()
        points = [int(round(x)) if self.dist.is_lattice else float(x) for x in xs]
        points = [x for x in points if self.dist.in_support(x)]
        if not points:
            raise ValidationError("grid lies outside the support", target=self.dist.name)
        return sorted(set(points))

    # Commands

    def bounds_cli(self) -> BoundReport:
        f = parse_function(self.spec.function)
        c = parse_function(self.spec.c) if self.spec.c else None
        h = parse_function(self.spec.h) if self.spec.h else None
        ell = self.shift()
        status(f"📊 Klaassen bounds for {f.label} with shift {ell}")
        return klaassen_bounds(self.dist, ell, f, c, h, self.cfg)

    def expand_cli(self) -> ExpansionReport:
        g = parse_function(self.spec.function)
        ells = None if self.spec.ell is None else ShiftSequence.parse(self.spec.ell)
        h = [parse_function(self.spec.h)] if self.spec.h else None
        mc = MonteCarloConfig(seed=self.spec.seed, samples=self.spec.samples) if self.spec.monte_carlo else None
        status(f"📊 Variance expansion of {g.label} to order {self.spec.order}")
        return variance_expansion(self.dist, g, self.spec.order, ells, self.cfg, self.spec.method, h, mc)

    def kernel_cli(self) -> GridReport:
        dist, ell = self.dist, self.shift()
        anchors = self.spec.at or [dist.mean]
        anchors = [int(round(a)) if dist.is_lattice else float(a) for a in anchors]
        rows, errors = [], []
        for x in anchors:
            for x_prime in self.grid():
                try:
                    k = kernel_K(dist, ell, x, x_prime, self.cfg)
                    rows.append([float(x), float(x_prime), float(k),
                                 float(kernel_over_density(dist, ell, x, x_prime, self.cfg))])
                except SteinError as exc:
                    errors.append(error_entry(exc, "kernel"))
                    rows.append([float(x), float(x_prime), None, None])
        status(f"📊 Kernel profile at {len(anchors)} anchor(s)")
        return GridReport(command="kernel", distribution=dist.name, ell=ell,
                          columns=["x", "x_prime", "k", "k_over_p"], rows=rows, errors=errors)

    def factors_cli(self) -> GridReport:
        dist, ell = self.dist, self.shift()
        rows = [[float(x), float(factor_R(dist, ell, x, self.cfg))] for x in self.grid()]
        best = max(rows, key=lambda r: r[1])
        status(f"📊 Stein factor sup {best[1]:.6g} at x = {best[0]:g}")
        return GridReport(command="factors", distribution=dist.name, ell=ell, columns=["x", "R"], rows=rows,
                          summary={'sup': best[1], 'argmax': best[0]})

    def verify_cli(self) -> VerifyReport:
        status(f"🧮 Running {'quick' if self.spec.quick else 'full'} property suite")
        report = run_verify(self.spec.quick, self.spec.seed, progress=lambda name: status(f"   • {name}"))
        for prop in report.properties:
            status(f"{'✅' if prop.passed else '❌'} {prop.name} ({prop.checks} checks)")
        return report

    # Dispatch and emission

    def run(self) -> int:
        handler = getattr(self, f"{self.spec.command}_cli")
        report = handler()
        self.emit(report)
        if isinstance(report, VerifyReport) and not report.passed:
            status("⚠️ Property failures detected")
            return EXIT_PROPERTY_FAILURE
        if isinstance(report, BoundReport) and not (report.lower_ok and report.upper_ok):
            return EXIT_PROPERTY_FAILURE
        if isinstance(report, ExpansionReport) and not all(report.sandwich_ok):
            return EXIT_PROPERTY_FAILURE
        return EXIT_OK

    def emit(self, report: BaseModel):
        text = report.model_dump_json(indent=2) if self.spec.output == "json" else render_csv(report)
        if self.spec.out:
            with open(self.spec.out, 'w', encoding='utf-8') as fh:
                fh.write(text)
            status(f"✅ Report written to {self.spec.out}")
        else:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")


def report_frame(report: BaseModel) -> pd.DataFrame:
    """Fixed CSV layout per report type"""
    if isinstance(report, GridReport):
        return report.to_frame()
    if isinstance(report, ExpansionReport):
        return pd.DataFrame({
            'k': list(range(1, len(report.terms) + 1)),
            'term': report.terms,
            'partial_sum': report.partial_sums,
            'bound': report.sandwich_flags,
            'sandwich_ok': report.sandwich_ok,
            'oracle_variance': [report.oracle_variance] * len(report.terms),
        })
    if isinstance(report, VerifyReport):
        return pd.DataFrame([p.model_dump(exclude={'errors'}) for p in report.properties])
    if isinstance(report, BoundReport):
        row: Dict = report.model_dump(exclude={'errors', 'tolerances'})
        row['tol_lower'], row['tol_upper'] = report.tolerances.lower, report.tolerances.upper
        return pd.DataFrame([row])
    return pd.DataFrame([report.model_dump()])


def render_csv(report: BaseModel) -> str:
    buffer = io.StringIO()
    report_frame(report).to_csv(buffer, index=False, float_format=FLOAT_FORMAT)
    return buffer.getvalue()


def run(spec: RunSpec) -> int:
    """Execute one run; SteinError surfaces as exit code 1 with a structured entry on stdout"""
    try:
        return SteinBoundsRunner(spec).run()
    except SteinError as exc:
        logger.debug("run failed", exc_info=True)
        status(f"❌ {type(exc).__name__}: {exc.message}")
        sys.stdout.write(json.dumps(error_entry(exc, spec.command)) + "\n")
        return EXIT_INVALID
