import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from src.exceptions import AllSolvesFailed, BenchError, InvalidCase

HARDY_FACTOR = 0.815
FRANKE_FACTOR = 1.25


@dataclass(frozen=True)
class SearchConfig:
    c_min: float = 0.05
    c_max: float = 50.0
    scan_points: int = 20
    max_evals: int = 60
    rel_tol: float = 1e-3
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.c_min < self.c_max:
            raise InvalidCase(f"Search bounds must satisfy 0 < c_min < c_max, got {self.c_min}, {self.c_max}")
        if self.scan_points < 3 or self.max_evals < self.scan_points:
            raise InvalidCase(f"Need >= 3 scan points and max_evals >= scan_points")
        if not self.rel_tol > 0:
            raise InvalidCase(f"rel_tol must be positive, got {self.rel_tol}")

    @classmethod
    def from_dict(cls, data: Dict) -> "SearchConfig":
        known = {"c_min", "c_max", "scan_points", "max_evals", "rel_tol", "workers"}
        unknown = set(data) - known
        if unknown:
            raise InvalidCase(f"Unknown search keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class OptResult:
    c_star: float
    rmse_at_c_star: float
    evaluation_trace: List[Tuple[float, float]] = field(default_factory=list)

    def trace_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.evaluation_trace, columns=["c", "rmse"])


class _BudgetExhausted(Exception):
    pass


class _Evaluator:
    """Memoized objective that records every distinct evaluation and enforces the budget."""

    def __init__(self, objective: Callable[[float], float], max_evals: int):
        self.objective = objective
        self.max_evals = max_evals
        self.trace: List[Tuple[float, float]] = []
        self._seen: Dict[float, float] = {}

    def _safe(self, c: float) -> float:
        try:
            value = float(self.objective(c))
        except (BenchError, np.linalg.LinAlgError, FloatingPointError) as e:
            logging.debug(f"Shape parameter c={c:.6g} failed: {e}")
            return math.inf
        return value if math.isfinite(value) else math.inf

    def record(self, c: float, value: float) -> float:
        self._seen[c] = value
        self.trace.append((c, value))
        logging.debug(f"c={c:.6g} rmse={value:.6e}")
        return value

    def __call__(self, c: float) -> float:
        c = float(c)
        if c in self._seen:
            return self._seen[c]
        if len(self.trace) >= self.max_evals:
            raise _BudgetExhausted()
        return self.record(c, self._safe(c))

    def scan(self, candidates: np.ndarray, workers: int) -> List[float]:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                values = list(pool.map(self._safe, candidates))
        else:
            values = [self._safe(c) for c in candidates]
        return [self.record(float(c), v) for c, v in zip(candidates, values)]


def optimize_shape_parameter(case, cloud=None, cfg: SearchConfig = SearchConfig(),
                             objective: Optional[Callable[[float], float]] = None) -> OptResult:
    """Log-spaced scan of c followed by golden-section refinement around the best scan point.

    The default objective solves the case on ``cloud`` and returns the RMSE
    of u (Poisson) or the sum of the velocity RMSEs (Stokes).
    """
    if objective is None:
        objective = shape_objective(case, cloud)
    evaluator = _Evaluator(objective, cfg.max_evals)

    candidates = np.geomspace(cfg.c_min, cfg.c_max, cfg.scan_points)
    values = evaluator.scan(candidates, cfg.workers)
    if all(math.isinf(v) for v in values):
        raise AllSolvesFailed(f"No shape parameter in [{cfg.c_min}, {cfg.c_max}] gave a usable solve")

    best = int(np.argmin(values))
    if best in (0, len(candidates) - 1):
        logging.warning(f"Best shape parameter {candidates[best]:.4g} lies on the search bound; refinement skipped")
    else:
        bracket = (candidates[best - 1], candidates[best], candidates[best + 1])
        try:
            minimize_scalar(evaluator, bracket=bracket, method="golden", options={"xtol": cfg.rel_tol})
        except _BudgetExhausted:
            logging.debug(f"Evaluation budget of {cfg.max_evals} reached")
        except ValueError as e:
            # Flat neighbourhoods do not form a strict bracket.
            logging.debug(f"Refinement skipped: {e}")

    c_star, rmse_star = min(evaluator.trace, key=lambda item: item[1])
    logging.info(f"Optimum shape parameter {c_star:.4g} (RMSE {rmse_star:.4e}, {len(evaluator.trace)} solves)")
    return OptResult(c_star, rmse_star, list(evaluator.trace))


def shape_objective(case, cloud=None, rtol: Optional[float] = None) -> Callable[[float], float]:
    """RMSE of a full solve of ``case`` at shape parameter c on a fixed cloud."""
    # Import here to avoid circular imports
    from src.bench.problems import build_cloud, build_problem, solve_problem

    cloud = cloud if cloud is not None else build_cloud(case)
    rtol = case.rtol if rtol is None else rtol

    def objective(c: float) -> float:
        problem = build_problem(case, cloud=cloud, shape=c)
        solution = solve_problem(problem, rtol)
        return problem.velocity_rmse(solution.state, solution.time)

    return objective


def literature_shape_parameter(cloud, rule: str = "hardy") -> float:
    """Closed-form MQ shape parameters used without an analytic solution.

    hardy: 0.815 times the mean nearest-neighbour distance.
    franke: 1.25 times the bounding-box diagonal over sqrt(N).
    """
    points = cloud.points
    if len(points) < 2:
        raise InvalidCase("Shape rules need at least two nodes")
    if rule == "hardy":
        distances, _ = cKDTree(points).query(points, k=2)
        return float(HARDY_FACTOR * distances[:, 1].mean())
    if rule == "franke":
        diagonal = float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
        return FRANKE_FACTOR * diagonal / math.sqrt(len(points))
    raise InvalidCase(f"Unknown shape rule {rule!r}")
