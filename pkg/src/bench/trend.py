import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import InsufficientPoints, NonPositiveValue, TrendError
from .cases import ResultRow

MIN_POINTS = 3
TRANSFORMS = ("log-log", "linear")


@dataclass(frozen=True)
class TrendFit:
    """Least-squares line y = slope * x + intercept in the transformed coordinates."""
    slope: float
    intercept: float
    n_points: int
    transform: str = "log-log"

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        if self.transform == "log-log":
            return np.exp(self.intercept) * x ** self.slope
        return self.slope * x + self.intercept

    def to_dict(self) -> Dict:
        return asdict(self)


def fit_trend(points: Sequence[Tuple[float, float]], transform: str = "log-log") -> TrendFit:
    if transform not in TRANSFORMS:
        raise TrendError(f"Unknown transform {transform!r}, expected one of {TRANSFORMS}")
    data = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if len(data) < MIN_POINTS:
        raise InsufficientPoints(f"Need at least {MIN_POINTS} points, got {len(data)}")
    x, y = data[:, 0], data[:, 1]
    if transform == "log-log":
        if np.any(~np.isfinite(data)) or np.any(data <= 0):
            raise NonPositiveValue("Log-log fits need finite positive coordinates")
        x, y = np.log(x), np.log(y)
    if np.ptp(x) == 0:
        raise InsufficientPoints("All points share the same abscissa")
    slope, intercept = np.polyfit(x, y, 1)
    return TrendFit(float(slope), float(intercept), len(data), transform)


def convergence_series(rows: Iterable[ResultRow], metric: str = "LSE") -> Dict[str, Dict[str, List[Tuple[float, float]]]]:
    """Per example and "method/field": (dh, metric) pairs of successful rows."""
    series: Dict[str, Dict[str, List[Tuple[float, float]]]] = {}
    for row in rows:
        if not row.ok:
            continue
        for name, report in row.reports.items():
            value = report.as_row()[metric]
            if value is None or not math.isfinite(value):
                continue
            key = f"{row.case.label}/{name}"
            series.setdefault(row.case.example.value, {}).setdefault(key, []).append((row.case.dh, float(value)))
    for by_method in series.values():
        for points in by_method.values():
            points.sort()
    return series


def _safe_fit(points: List[Tuple[float, float]]) -> Optional[Dict]:
    try:
        return fit_trend(points).to_dict()
    except TrendError as e:
        logging.debug(f"No trend fit: {e}")
        return None


def trend_series(rows: Iterable[ResultRow], metric: str = "LSE") -> Dict[str, Dict[str, Dict]]:
    """Node count vs runtime, runtime vs accuracy and node count vs accuracy per method.

    Accuracy is the inverse of ``metric`` on the first solution field.
    """
    grouped: Dict[str, List[Tuple[int, float, float]]] = {}
    for row in rows:
        if not row.ok or not row.reports:
            continue
        report = next(iter(row.reports.values()))
        error = report.as_row()[metric]
        if not error or not math.isfinite(error) or error <= 0:
            continue
        key = f"{row.case.example.value}/{row.case.label}"
        grouped.setdefault(key, []).append((row.n_nodes, report.runtime_s, 1.0 / error))

    out: Dict[str, Dict[str, Dict]] = {}
    for key, values in grouped.items():
        values.sort()
        pairs = {
            "nodes_vs_runtime": [(n, rt) for n, rt, _ in values],
            "runtime_vs_accuracy": sorted((rt, acc) for _, rt, acc in values),
            "nodes_vs_accuracy": [(n, acc) for n, _, acc in values],
        }
        out[key] = {name: {"points": pts, "fit": _safe_fit(pts)} for name, pts in pairs.items()}
    return out
