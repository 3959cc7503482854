import logging
import time as clock
from typing import Optional

from src.exceptions import InvalidCase
from .backward_euler import TransientResult, integrate


def run_transient(case, problem=None, record_trace: Optional[bool] = None, rtol: Optional[float] = None) -> TransientResult:
    """March a case from its analytic t=0 state to the final time.

    Errors are measured by the caller at ``result.final_time`` only; the
    per-step RMSE trace is recorded when ``record_trace`` (default
    ``case.trace``) is set.
    """
    if case.time is None:
        raise InvalidCase(f"{case.example.value} has no time configuration")
    if problem is None:
        # Import here to avoid circular imports
        from src.bench.problems import build_problem
        problem = build_problem(case)
    record_trace = case.trace if record_trace is None else record_trace
    rtol = case.rtol if rtol is None else rtol

    start = clock.perf_counter()
    op = problem.transient_operator()
    monitor = problem.velocity_rmse if record_trace else None
    result = integrate(op, problem.rhs, problem.initial_state(), case.time, rtol=rtol, monitor=monitor)
    logging.debug(
        f"{case.example.value} {case.label}: {result.n_steps} steps to t={result.final_time:g} "
        f"in {clock.perf_counter() - start:.2f}s, max residual {result.max_residual:.2e}"
    )
    return result
