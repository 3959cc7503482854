import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Iterable, List, Optional

import numpy as np

from src.exceptions import BenchError
from src.shapeopt import SearchConfig, literature_shape_parameter, optimize_shape_parameter
from .cases import CaseSpec, Method, ResultRow
from .problems import build_cloud, build_problem, solve_problem

RESIDUAL_TOL = 1e-8
CONDITION_LIMIT = 1e14


class BenchmarkRunner:
    """Runs cases one at a time or as a suite, turning each into a ResultRow."""

    def __init__(self, config=None, search: Optional[SearchConfig] = None):
        self.config = config
        self.rtol = getattr(config, "pinv_rtol", None)
        self.workers = int(getattr(config, "workers", 1) or 1)
        self.search = search or SearchConfig(workers=self.workers)

    def _shape_parameter(self, case: CaseSpec, cloud):
        """(c, optimizer trace) for MQ cases; the optimizer only runs without fixed_c or a rule."""
        if case.fixed_c is not None:
            return case.fixed_c, None
        if case.shape_rule is not None:
            c = literature_shape_parameter(cloud, case.shape_rule)
            logging.info(f"Shape parameter from the {case.shape_rule} rule: {c:.4g}")
            return c, None
        result = optimize_shape_parameter(case, cloud, self.search)
        return result.c_star, result.trace_frame()

    def run_case(self, case: CaseSpec) -> ResultRow:
        """Assemble, solve and measure one case.

        Runtime covers the shape parameter search, assembly and solve;
        mesh generation and error evaluation are excluded.
        """
        logging.info(f"Running {case.example.value} {case.label} dh={case.dh_label}")
        case_for_solve = case if case.rtol is not None or self.rtol is None else replace(case, rtol=self.rtol)
        rtol = case_for_solve.rtol

        cloud = build_cloud(case) if case.method.is_rbf else None
        shape, optimizer_trace = None, None
        optimize_time = 0.0
        if case.method == Method.RBF_MQ:
            start = time.perf_counter()
            shape, optimizer_trace = self._shape_parameter(case_for_solve, cloud)
            optimize_time = time.perf_counter() - start

        problem = build_problem(case_for_solve, cloud=cloud, shape=shape)
        start = time.perf_counter()
        solution = solve_problem(problem, rtol, record_trace=case.trace)
        runtime = optimize_time + time.perf_counter() - start

        report = solution.report
        # Residual alone decides; coarse all-Dirichlet Stokes clouds are rank deficient.
        flagged = report.overflow or solution.residual > RESIDUAL_TOL
        if flagged:
            cause = "ill-conditioned" if report.condition_number >= CONDITION_LIMIT else "inconsistent"
            logging.warning(
                f"{case.example.value} {case.label} dh={case.dh_label}: residual {solution.residual:.2e}, "
                f"condition number {report.condition_number:.3e} ({cause})"
            )

        reports = problem.error_reports(solution.state, solution.time)
        for error_report in reports.values():
            error_report.condition_number = report.condition_number
            error_report.runtime_s = runtime
            error_report.shape_parameter = shape
            error_report.tps_beta = case.tps_beta if case.method == Method.RBF_TPS else None

        first = next(iter(reports.values()))
        logging.info(
            f"Finished {case.example.value} {case.label} dh={case.dh_label}: "
            f"RMSE {first.rmse:.4e}, CN {report.condition_number:.4e}, {runtime:.2f}s"
        )
        return ResultRow(
            case=case,
            reports=reports,
            n_nodes=problem.n_nodes,
            residual=solution.residual,
            flagged=bool(flagged),
            optimizer_trace=optimizer_trace,
            time_trace=solution.trace,
            geometry=problem.geometry(),
        )

    def _run_safe(self, case: CaseSpec) -> ResultRow:
        try:
            return self.run_case(case)
        except (BenchError, np.linalg.LinAlgError, FloatingPointError) as e:
            logging.error(f"Case {case.example.value} {case.label} dh={case.dh_label} failed: {e}", exc_info=True)
            return ResultRow.failed(case, e)

    def run_suite(self, cases: Iterable[CaseSpec]) -> List[ResultRow]:
        """Run every case; failures become failed rows and the rest still run."""
        cases = sorted(cases, key=lambda c: c.key)
        if self.workers > 1 and len(cases) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                rows = list(pool.map(self._run_safe, cases))
        else:
            rows = [self._run_safe(case) for case in cases]
        failed = sum(not row.ok for row in rows)
        logging.info(f"Suite finished: {len(rows) - failed} succeeded, {failed} failed")
        return rows


def run_case(case: CaseSpec, config=None, search: Optional[SearchConfig] = None) -> ResultRow:
    return BenchmarkRunner(config, search).run_case(case)
