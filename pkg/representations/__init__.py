"""
SteinBounds Representations Package

Covariance kernels and the identities the bounds are built on:
- Closed-form covariance kernel K^ℓ and its Gram matrices
- Three-point and four-point Φ weights
- Kernel and double-expectation routes to the pseudo-inverse
- Covariance identities through L^ℓ and through K^ℓ
- Pair-variance, increment and probabilistic Lagrange identities
- Binomial and Poisson natural-gradient identities
"""

from .identities import (
    IdentityCheck,
    LagrangeReport,
    cov_via_inverse,
    cov_via_kernel,
    covariance,
    direct_covariance,
    increment_representation,
    lagrange_residual,
    natural_gradient_identity,
    variance_pair_identity,
)
from .kernel import (
    inverse_via_double,
    inverse_via_kernel,
    kernel_K,
    kernel_matrix,
    kernel_over_density,
    phi_interval,
    phi_weight,
    phi_weight4,
    tail_ratio,
)

__all__ = [
    'kernel_K', 'kernel_matrix', 'kernel_over_density', 'phi_interval', 'phi_weight', 'phi_weight4',
    'tail_ratio', 'inverse_via_kernel', 'inverse_via_double',
    'IdentityCheck', 'LagrangeReport', 'covariance', 'direct_covariance', 'cov_via_inverse',
    'cov_via_kernel', 'variance_pair_identity', 'increment_representation', 'lagrange_residual',
    'natural_gradient_identity',
]
__version__ = '1.0.0'
