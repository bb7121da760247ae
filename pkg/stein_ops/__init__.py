"""
SteinBounds Stein Operators Package

Canonical Stein operators and their inverses:
- χ^ℓ indicators and Δ^ℓ differences/derivatives
- Canonical operator T^ℓ and pseudo-inverse L^ℓ with tail-stable evaluation
- Stein kernel, standardized operator and Stein equation solutions
- Numeric canonical-class admissibility checks
- A vocabulary of test functions with analytic derivatives
"""

from .config import Shift, SteinConfig, check_shift, default_shift
from .functions import (
    TestFunction,
    as_test_function,
    chi,
    clipped,
    constant,
    delta,
    exponential,
    half_power,
    identity,
    indicator_le,
    polynomial,
    power,
    sine,
    smoothed_indicator,
    table_function,
)
from .operators import (
    CanonicalClassReport,
    OperatorResult,
    canonical_class_check,
    canonical_op,
    centered,
    mean_of,
    partial_moment,
    pseudo_inverse,
    score_function,
    solve_stein_equation,
    standardized_op,
    stein_kernel,
)

__all__ = [
    'Shift', 'SteinConfig', 'check_shift', 'default_shift',
    'TestFunction', 'as_test_function', 'chi', 'delta',
    'identity', 'constant', 'power', 'polynomial', 'exponential', 'sine', 'indicator_le',
    'smoothed_indicator', 'clipped', 'half_power', 'table_function',
    'OperatorResult', 'CanonicalClassReport', 'canonical_op', 'pseudo_inverse', 'partial_moment',
    'stein_kernel', 'standardized_op', 'solve_stein_equation', 'canonical_class_check',
    'mean_of', 'centered', 'score_function',
]
__version__ = '1.0.0'
