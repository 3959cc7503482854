"""
Manufactured-solution cases, case execution, suite output and trend fitting
"""
from .catalog import (
    Example,
    analytic_gradient,
    analytic_solution,
    dirichlet_data,
    example_domain,
    natural_traction,
    neumann_data,
    physical_spacing,
    pressure_pin,
    source_term,
)
from .cases import CaseSpec, Method, ResultRow, parse_spacing, spacing_label
from .problems import Problem, Solution, build_cloud, build_problem, solve_problem
from .runner import BenchmarkRunner, run_case
from .trend import TrendFit, convergence_series, fit_trend, trend_series
from .suite import convergence_bundle, load_suite, results_frame, run_suite, write_suite

__all__ = [
    'Example', 'analytic_gradient', 'analytic_solution', 'dirichlet_data', 'example_domain',
    'natural_traction', 'neumann_data', 'physical_spacing', 'pressure_pin', 'source_term',
    'CaseSpec', 'Method', 'ResultRow', 'parse_spacing', 'spacing_label',
    'Problem', 'Solution', 'build_cloud', 'build_problem', 'solve_problem',
    'BenchmarkRunner', 'run_case',
    'TrendFit', 'convergence_series', 'fit_trend', 'trend_series',
    'convergence_bundle', 'load_suite', 'results_frame', 'run_suite', 'write_suite',
]
