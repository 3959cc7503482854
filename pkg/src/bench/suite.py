import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from src.exceptions import ConfigParseError, InvalidCase, TrendError
from src.shapeopt import SearchConfig
from src.utils import read_json_config, write_json, write_table
from .cases import RESULT_COLUMNS, CaseSpec, ResultRow
from .runner import BenchmarkRunner
from .trend import convergence_series, fit_trend, trend_series

BUNDLE_METRICS = ("LSE", "L2", "RMSE")


def load_suite(
    config_path: Union[str, Path],
    final_time_override: Optional[float] = None,
    workers: int = 1,
) -> Tuple[List[CaseSpec], SearchConfig]:
    """Parse a suite file: a list of cases, or {"cases": [...], "search": {...}}."""
    data = read_json_config(config_path)
    search = {}
    if isinstance(data, dict):
        unknown = set(data) - {"cases", "search"}
        if unknown:
            raise ConfigParseError(f"Unknown suite keys {sorted(unknown)} in {config_path}")
        search = data.get("search", {}) or {}
        data = data.get("cases", [])
    if not isinstance(data, list):
        raise ConfigParseError(f"Suite {config_path} must hold a list of cases")

    cases = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise ConfigParseError(f"not an object in {config_path}", case_index=i)
        try:
            cases.append(CaseSpec.from_dict(entry, final_time_override))
        except (InvalidCase, ValueError, TypeError) as e:
            raise ConfigParseError(f"{e} in {config_path}", case_index=i) from e
    try:
        search_cfg = SearchConfig.from_dict({"workers": workers, **search})
    except (InvalidCase, TypeError) as e:
        raise ConfigParseError(f"Invalid search settings in {config_path}: {e}") from e
    logging.info(f"Loaded {len(cases)} cases from {config_path}")
    return cases, search_cfg


def results_frame(rows: Sequence[ResultRow]) -> pd.DataFrame:
    records = [record for row in rows for record in row.to_records()]
    return pd.DataFrame(records, columns=RESULT_COLUMNS)


def convergence_bundle(rows: Sequence[ResultRow]) -> Dict:
    """log dh vs log error series per example and method, with fitted slopes."""
    bundle: Dict = {"series": {}, "slopes": {}}
    for metric in BUNDLE_METRICS:
        series = convergence_series(rows, metric)
        bundle["series"][metric] = series
        slopes: Dict[str, Dict] = {}
        for example, by_method in series.items():
            for key, points in by_method.items():
                try:
                    slopes.setdefault(example, {})[key] = fit_trend(points).to_dict()
                except TrendError as e:
                    logging.debug(f"No {metric} slope for {example} {key}: {e}")
        bundle["slopes"][metric] = slopes
    bundle["trends"] = trend_series(rows)
    return bundle


def write_suite(rows: Sequence[ResultRow], out_dir: Union[str, Path]) -> List[Path]:
    """One CSV per example, a combined results.csv and the convergence bundle."""
    out_dir = Path(out_dir)
    frame = results_frame(rows)
    written = [write_table(frame, out_dir / "results.csv")]
    for example, table in frame.groupby("example", sort=False):
        written.append(write_table(table, out_dir / f"{example}.csv"))
    written.append(write_json(convergence_bundle(rows), out_dir / "convergence_bundle.json"))
    return written


def run_suite(config_path: Union[str, Path], out_dir: Union[str, Path], config=None) -> List[ResultRow]:
    """Load, run and write a suite; returns the rows so callers can set the exit code."""
    workers = int(getattr(config, "workers", 1) or 1)
    cases, search = load_suite(config_path, getattr(config, "final_time_override", None), workers)
    rows = BenchmarkRunner(config, search).run_suite(cases)
    write_suite(rows, out_dir)
    return rows
