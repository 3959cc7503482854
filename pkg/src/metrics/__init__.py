"""
Error measures: element-volume LSE, L2, RMSE and maximum relative error
"""
from .errors import (
    ErrorReport,
    MRE_FLOOR,
    element_volumes,
    l2_error,
    lse,
    max_relative_error,
    rmse,
    surface_values,
)

__all__ = [
    'ErrorReport', 'MRE_FLOOR', 'element_volumes', 'l2_error', 'lse',
    'max_relative_error', 'rmse', 'surface_values',
]
