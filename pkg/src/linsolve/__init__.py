"""
Dense pseudo-inverse solves with condition and rank diagnostics
"""
from .pinv import PseudoInverse, SolveReport, condition_number, pinv_solve

__all__ = ['PseudoInverse', 'SolveReport', 'condition_number', 'pinv_solve']
