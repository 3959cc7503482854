import json
import logging
import math
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import pandas as pd

from src.exceptions import ConfigParseError, InvalidCase

SCIENTIFIC = "%.3e"


def safe_read_csv(file_path: Union[str, Path], **kwargs) -> Optional[pd.DataFrame]:
    """Safely read a CSV file with proper error handling"""
    try:
        return pd.read_csv(file_path, **kwargs)
    except Exception as e:
        logging.error(f"Error reading CSV file {file_path}: {e}")
        return None


def ensure_columns(df: pd.DataFrame, required_columns: list) -> pd.DataFrame:
    """Return the frame if it has every required column, raise otherwise"""
    missing = [col for col in required_columns if col not in df.columns]
    if missing:
        raise InvalidCase(f"Missing columns {missing}; available: {list(df.columns)}")
    return df


def read_json_config(file_path: Union[str, Path]) -> Any:
    """Load a JSON configuration file, reporting the offending line on syntax errors"""
    path = Path(file_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigParseError(f"Cannot read configuration {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"Invalid JSON in {path}: {e.msg}", e.lineno) from e


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_json(data: Any, file_path: Union[str, Path]) -> Path:
    """Write JSON with non-finite numbers as null"""
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_jsonable(data), f, indent=2)
    logging.info(f"Wrote {path}")
    return path


def write_table(df: pd.DataFrame, file_path: Union[str, Path], float_format: str = SCIENTIFIC) -> Path:
    """Write a CSV table with floats in 4-significant-digit scientific notation"""
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=float_format)
    logging.info(f"Wrote {path} ({len(df)} rows)")
    return path
