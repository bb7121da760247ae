"""
SteinBounds Bounds Package

Variance and covariance bounds built on the Stein kernel:
- Klaassen-type lower and upper variance bounds
- Iterated coefficients Γ_k in closed, lemma and nested forms
- Arbitrary-order variance expansions with the alternating sandwich
- Gaussian expansion with σ^{2k}/k! weights
- Olkin-Shepp matrix bound and the matrix Cauchy-Schwarz residual
"""

from .expansion import houdre_kagan_gaussian, iterated_functions, remainder_monte_carlo, variance_expansion
from .gamma import (
    GAMMA_METHODS,
    family_gamma,
    gamma_density,
    gamma_k,
    pearson_kernel,
    rising_factorial,
)
from .klaassen import (
    check_weight_sign,
    default_c,
    klaassen_bounds,
    klaassen_lower,
    klaassen_upper,
    oracle_variance,
    upper_weight,
)
from .matrix import matrix_cs_residual, olkin_shepp
from .reports import (
    BoundReport,
    ExpansionReport,
    MatrixBoundReport,
    MatrixCSReport,
    ShiftSequence,
    Tolerances,
)

__all__ = [
    'ShiftSequence', 'Tolerances', 'BoundReport', 'ExpansionReport', 'MatrixBoundReport', 'MatrixCSReport',
    'GAMMA_METHODS', 'rising_factorial', 'pearson_kernel', 'family_gamma', 'gamma_density', 'gamma_k',
    'oracle_variance', 'default_c', 'upper_weight', 'check_weight_sign',
    'klaassen_lower', 'klaassen_upper', 'klaassen_bounds',
    'variance_expansion', 'iterated_functions', 'remainder_monte_carlo', 'houdre_kagan_gaussian',
    'olkin_shepp', 'matrix_cs_residual',
]
__version__ = '1.0.0'
