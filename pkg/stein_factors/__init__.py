"""
SteinBounds Stein Factors Package

Bounds on solutions of Stein equations:
- The factor R^ℓ = K^ℓ(x, x)/p(x) and its profile on a grid
- Sup-norm bound |L^ℓ h| ≤ 2‖h‖∞ R^ℓ
- Lipschitz-type bounds on g = L h / L η
- Gaussian Mills-ratio chain
- Sampled monotonicity and sign-constancy checks
"""

from .factors import (
    FactorProfile,
    InverseBoundCheck,
    LipschitzCheck,
    MillsBounds,
    factor_profile,
    factor_R,
    inverse_bound_check,
    lipschitz_domination,
    lipschitz_solution_bound,
    mills_bounds_gaussian,
    monotone_direction,
    sign_constancy_check,
    sup_norm,
)

__all__ = [
    'FactorProfile', 'InverseBoundCheck', 'LipschitzCheck', 'MillsBounds',
    'factor_R', 'factor_profile', 'sup_norm', 'inverse_bound_check',
    'lipschitz_domination', 'lipschitz_solution_bound', 'mills_bounds_gaussian',
    'monotone_direction', 'sign_constancy_check',
]
__version__ = '1.0.0'
