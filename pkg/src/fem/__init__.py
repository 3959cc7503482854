"""
Galerkin finite elements: reference machinery, Poisson and Taylor-Hood Stokes assembly
"""
from .reference import QuadratureRule, ReferenceElement, edge_rule, quad_rule, shape_eval
from .assembly import (
    AssembledSystem,
    DirichletData,
    Layout,
    NeumannData,
    PressurePin,
    assemble_load,
    assemble_mass,
    assemble_neumann,
    assemble_poisson,
    assemble_stiffness,
    assemble_stokes,
    divergence_blocks,
    poisson_rhs,
    stokes_constrained_rows,
    stokes_rhs,
)
from .field import FemField

__all__ = [
    'QuadratureRule', 'ReferenceElement', 'edge_rule', 'quad_rule', 'shape_eval',
    'AssembledSystem', 'DirichletData', 'Layout', 'NeumannData', 'PressurePin',
    'assemble_load', 'assemble_mass', 'assemble_neumann', 'assemble_poisson',
    'assemble_stiffness', 'assemble_stokes', 'divergence_blocks', 'poisson_rhs',
    'stokes_constrained_rows', 'stokes_rhs',
    'FemField',
]
