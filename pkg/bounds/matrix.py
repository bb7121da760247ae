import logging

import numpy as np

from distribution import TargetDistribution
from numerics import (
    DEFAULT_QUADRATURE,
    PSD_TOLERANCE,
    QuadratureConfig,
    integrate2,
    integrate_vec,
    lattice_sum,
    min_eigenvalue,
    symmetrize,
    tolerance_for,
)
from representations import covariance, phi_interval
from stein_ops import as_test_function, check_shift, delta

from .klaassen import check_weight_sign, upper_weight
from .reports import MatrixBoundReport, MatrixCSReport

logger = logging.getLogger(__name__)


def _matrix(entries) -> np.ndarray:
    """[[e0, e1], [e1, e2]] as floats"""
    e0, e1, e2 = (float(e) for e in entries)
    return np.array([[e0, e1], [e1, e2]])


def olkin_shepp(dist: TargetDistribution, ell: int, f, g, h=None,
                cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> MatrixBoundReport:
    """Cov[(f, g)] ≼ E[v vᵀ (−L^ℓ h)/Δ^{−ℓ}h] with v = (Δ^{−ℓ}f, Δ^{−ℓ}g), in the Loewner order"""
    ell = check_shift(dist, ell)
    f, g = as_test_function(f), as_test_function(g)
    h = None if h is None else as_test_function(h)
    weight = upper_weight(dist, ell, h, cfg)
    check_weight_sign(dist, weight, "id" if h is None else h.label)

    var_f = covariance(dist, f, f, cfg)
    cov_fg = covariance(dist, f, g, cfg)
    var_g = covariance(dist, g, g, cfg)
    lhs = _matrix([var_f.value, cov_fg.value, var_g.value])

    def integrand(x):
        w = weight(x)
        if w == 0:
            return [0, 0, 0]
        df, dg = delta(-ell, f, x, cfg), delta(-ell, g, x, cfg)
        return [df * df * w, df * dg * w, dg * dg * w]

    points = f.breakpoints + g.breakpoints + (h.breakpoints if h else ()) + dist.quad_breakpoints()
    values, error = integrate_vec(integrand, dist.support, 3, cfg, points)
    rhs = _matrix(values)

    diff = rhs - lhs
    error = error + var_f.error_estimate + cov_fg.error_estimate + var_g.error_estimate
    scale = max(1.0, float(np.max(np.abs(rhs))))
    tol = max(PSD_TOLERANCE, tolerance_for(error), 1e-10 * scale)
    diff_eig = min_eigenvalue(diff)
    det_slack = float(np.linalg.det(rhs) - np.linalg.det(lhs))
    logger.debug("olkin-shepp %s/%s on %s: min eig %.3e, det slack %.3e", f.label, g.label, dist.name,
                 diff_eig, det_slack)

    return MatrixBoundReport(
        distribution=dist.name,
        functions=[f.label, g.label],
        ell=ell,
        lhs=lhs.tolist(),
        rhs=rhs.tolist(),
        diff_min_eigenvalue=diff_eig,
        det_inequality_slack=det_slack,
        scalar_slacks=[float(diff[0, 0]), float(diff[1, 1])],
        psd_ok=diff_eig >= -tol,
        det_ok=det_slack >= -tol * scale,
    )


def matrix_cs_residual(dist: TargetDistribution, ell: int, a, b, f, u, v,
                       cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> MatrixCSReport:
    """E[(a, b)ᵀ f Φ] E[(a, b) f Φ] ≼ E[(a, b)ᵀ(a, b) Φ]·E[f² Φ], with the residual written out.

    All Φ-weighted expectations reduce to integrals against μ over the points between
    u and v; the residual integrates w wᵀ, w = (a₁f₂ − a₂f₁, b₁f₂ − b₂f₁), over x₁ < x₂.
    """
    ell = check_shift(dist, ell)
    a, b, f = as_test_function(a), as_test_function(b), as_test_function(f)
    interval = phi_interval(dist, ell, u, v)
    if interval is None:
        zero = [[0.0, 0.0], [0.0, 0.0]]
        return MatrixCSReport(lhs=zero, rhs=zero, residual=zero, residual_min_eigenvalue=0.0,
                              identity_error=0.0, holds=True)

    def cross(x1, x2):
        return a(x1) * f(x2) - a(x2) * f(x1), b(x1) * f(x2) - b(x2) * f(x1)

    if dist.is_lattice:
        pts = list(interval.points())
        rows = [(a(k), b(k), f(k)) for k in pts]
        m_a = lattice_sum(ak * fk for ak, _, fk in rows).value
        m_b = lattice_sum(bk * fk for _, bk, fk in rows).value
        gram = [lattice_sum(ak * ak for ak, _, _ in rows).value,
                lattice_sum(ak * bk for ak, bk, _ in rows).value,
                lattice_sum(bk * bk for _, bk, _ in rows).value]
        f_sq = lattice_sum(fk * fk for _, _, fk in rows).value
        pairs = [cross(x1, x2) for i, x1 in enumerate(pts) for x2 in pts[i + 1:]]
        residual = [lattice_sum(wa * wa for wa, _ in pairs).value,
                    lattice_sum(wa * wb for wa, wb in pairs).value,
                    lattice_sum(wb * wb for _, wb in pairs).value]
        lhs_entries = [m_a * m_a, m_a * m_b, m_b * m_b]
        rhs_entries = [e * f_sq for e in gram]
        # rational inputs make the identity exact
        error = max(abs(float(r - l - s)) for r, l, s in zip(rhs_entries, lhs_entries, residual))
        scale = max([1.0] + [abs(float(x)) for x in rhs_entries])
        tol = max(PSD_TOLERANCE, tolerance_for(0.0, 1e-12 * scale))
    else:
        points = a.breakpoints + b.breakpoints + f.breakpoints
        moments, err_m = integrate_vec(lambda x: [a(x) * f(x), b(x) * f(x)], interval, 2, cfg, points)
        gram, err_g = integrate_vec(lambda x: [a(x) ** 2, a(x) * b(x), b(x) ** 2, f(x) ** 2], interval, 4, cfg,
                                    points)
        m_a, m_b = moments
        f_sq = gram[3]
        residual = []
        err_r = 0.0
        for i, j in ((0, 0), (0, 1), (1, 1)):
            res = integrate2(lambda x1, x2, i=i, j=j: cross(x1, x2)[i] * cross(x1, x2)[j], interval,
                             lambda x1: interval.restrict(lower=x1), cfg, points, points)
            residual.append(res.value)
            err_r += res.error_estimate
        lhs_entries = [m_a * m_a, m_a * m_b, m_b * m_b]
        rhs_entries = [e * f_sq for e in gram[:3]]
        error = max(abs(r - l - s) for r, l, s in zip(rhs_entries, lhs_entries, residual))
        scale = max([1.0] + [abs(x) for x in rhs_entries])
        tol = max(PSD_TOLERANCE, tolerance_for(scale * (err_m + err_g) + err_r))

    r_matrix = symmetrize(_matrix(residual))
    r_eig = min_eigenvalue(r_matrix)
    return MatrixCSReport(
        lhs=_matrix(lhs_entries).tolist(),
        rhs=_matrix(rhs_entries).tolist(),
        residual=r_matrix.tolist(),
        residual_min_eigenvalue=r_eig,
        identity_error=float(error),
        holds=r_eig >= -tol and error <= tol,
    )
