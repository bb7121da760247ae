"""
SteinBounds Distribution Package

Univariate targets on an interval or an integer lattice:
- Builtin Normal, Beta, Gamma, Laplace, Binomial, Poisson and Hypergeometric laws
- User densities and density tables with numeric cdf and moments
- Exact rational masses for finite lattices
- Diagnostics for normalization, cdf monotonicity and support consistency
- JSON and inline specification parsing
"""

from numerics import MeasureKind, SupportSpec

from .families import (
    BetaFamily,
    BinomialFamily,
    BuiltinFamily,
    GammaFamily,
    HypergeometricFamily,
    LaplaceFamily,
    NormalFamily,
    PoissonFamily,
    family_from_params,
    make_builtin,
    parse_distribution_spec,
    parse_inline_spec,
)
from .target import (
    DistributionDiagnostics,
    TargetDistribution,
    make_custom,
    make_custom_from_table,
    validate,
)


def support_grid(dist: TargetDistribution, n: int = 20):
    """Interior evaluation grid; lattice points for counting targets"""
    return dist.grid(n)


__all__ = [
    'MeasureKind', 'SupportSpec', 'TargetDistribution', 'DistributionDiagnostics',
    'NormalFamily', 'BetaFamily', 'GammaFamily', 'LaplaceFamily', 'BinomialFamily', 'PoissonFamily',
    'HypergeometricFamily', 'BuiltinFamily',
    'make_builtin', 'make_custom', 'make_custom_from_table', 'validate', 'support_grid',
    'family_from_params', 'parse_inline_spec', 'parse_distribution_spec',
]
__version__ = '1.0.0'
