import math

import numpy as np
import pytest

from config import Config
from src.exceptions import ConfigParseError
from src.utils import read_json_config, write_json, write_table


def test_defaults(config, tmp_path):
    assert config.output_folder == tmp_path / "out"
    assert config.output_folder.is_dir()
    assert config.log_file.name == "bench.log"
    assert config.final_time_override is None
    assert config.workers == 1
    assert config.default_suite_file.name == "full_suite.json"


def test_environment_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("FEMRBF_DATA_DIR", str(tmp_path))
    monkeypatch.setenv("FEMRBF_FINAL_TIME", "1")
    monkeypatch.setenv("FEMRBF_WORKERS", "3")
    monkeypatch.setenv("FEMRBF_PINV_RTOL", "not-a-number")
    config = Config()
    assert config.output_folder == tmp_path / "output"
    assert config.final_time_override == 1.0
    assert config.workers == 3
    assert config.pinv_rtol is None


def test_read_json_config_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "a": 1,\n  "b": \n}\n')
    with pytest.raises(ConfigParseError) as info:
        read_json_config(path)
    assert info.value.lineno == 4


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigParseError):
        read_json_config(tmp_path / "absent.json")


def test_write_json_replaces_non_finite(tmp_path):
    path = write_json({"cn": math.inf, "values": np.array([1.0, np.nan])}, tmp_path / "x.json")
    assert path.read_text().count("null") == 2


def test_write_table_uses_scientific_notation(tmp_path):
    import pandas as pd
    path = write_table(pd.DataFrame({"RMSE": [7.569e-05]}), tmp_path / "t.csv")
    assert "7.569e-05" in path.read_text()
