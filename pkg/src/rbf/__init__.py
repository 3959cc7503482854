"""
Radial kernels and Kansa collocation
"""
from .kernels import (
    RbfFamily,
    RbfKind,
    rbf_derivs,
    rbf_eval,
    rbf_gradient,
    rbf_laplacian,
    rbf_second,
)
from .kansa import (
    Coefficients,
    KansaSystem,
    assemble_kansa_poisson,
    assemble_kansa_stokes,
    boundary_normals,
    evaluate_solution,
    interpolation_matrix,
    kansa_poisson_rhs,
    kansa_stokes_rhs,
    offsets,
    pin_node,
)

__all__ = [
    'RbfFamily', 'RbfKind', 'rbf_derivs', 'rbf_eval', 'rbf_gradient', 'rbf_laplacian', 'rbf_second',
    'Coefficients', 'KansaSystem', 'assemble_kansa_poisson', 'assemble_kansa_stokes', 'boundary_normals',
    'evaluate_solution', 'interpolation_matrix', 'kansa_poisson_rhs', 'kansa_stokes_rhs', 'offsets',
    'pin_node',
]
