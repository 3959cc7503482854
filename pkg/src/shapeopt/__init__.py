"""
Multiquadric shape parameter search
"""
from .search import (
    OptResult,
    SearchConfig,
    literature_shape_parameter,
    optimize_shape_parameter,
    shape_objective,
)

__all__ = [
    'OptResult', 'SearchConfig', 'literature_shape_parameter',
    'optimize_shape_parameter', 'shape_objective',
]
