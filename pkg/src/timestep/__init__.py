"""
Backward Euler time stepping for Poisson and Stokes in both discretizations
"""
from .backward_euler import (
    BackwardEulerStepper,
    TimeConfig,
    TransientOperator,
    TransientResult,
    integrate,
    step_poisson,
    step_stokes,
    stokes_operator,
)
from .transient import run_transient

__all__ = [
    'BackwardEulerStepper', 'TimeConfig', 'TransientOperator', 'TransientResult',
    'integrate', 'step_poisson', 'step_stokes', 'stokes_operator', 'run_transient',
]
