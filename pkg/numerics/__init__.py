"""
SteinBounds Numerics Package

Shared integration and summation engine:
- Adaptive quadrature on finite and infinite intervals
- Truncated and exact rational lattice sums
- Iterated double integrals
- Seeded Monte Carlo with standard errors
- One tolerance policy and PSD checks
- The error hierarchy used by every package
"""

from .domain import MeasureKind, SupportSpec
from .engine import (
    DEFAULT_MONTE_CARLO,
    DEFAULT_QUADRATURE,
    PSD_TOLERANCE,
    IntegrationResult,
    MonteCarloConfig,
    MonteCarloResult,
    QuadratureConfig,
    integrate,
    integrate2,
    integrate_vec,
    is_exact_number,
    is_psd,
    lattice_sum,
    mc_expect,
    min_eigenvalue,
    standard_error,
    symmetrize,
    tolerance_for,
)
from .errors import (
    DegenerateDenominator,
    InvalidParameter,
    MissingDerivative,
    NoConvergence,
    NotIntegrable,
    NotNormalized,
    SignViolation,
    SteinError,
    UnsupportedOrder,
    UnsupportedSupport,
    ValidationError,
    ZeroDensity,
    error_entry,
)

__all__ = [
    'MeasureKind', 'SupportSpec',
    'QuadratureConfig', 'MonteCarloConfig', 'DEFAULT_QUADRATURE', 'DEFAULT_MONTE_CARLO', 'PSD_TOLERANCE',
    'IntegrationResult', 'MonteCarloResult',
    'integrate', 'integrate2', 'integrate_vec', 'lattice_sum', 'mc_expect',
    'is_exact_number', 'tolerance_for', 'standard_error', 'symmetrize', 'min_eigenvalue', 'is_psd',
    'SteinError', 'InvalidParameter', 'NotNormalized', 'UnsupportedSupport', 'MissingDerivative',
    'ZeroDensity', 'NotIntegrable', 'DegenerateDenominator', 'SignViolation', 'UnsupportedOrder',
    'NoConvergence', 'ValidationError', 'error_entry',
]
__version__ = '1.0.0'
