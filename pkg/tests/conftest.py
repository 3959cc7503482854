import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.geometry import (  # noqa: E402
    NodeTag,
    build_node_cloud,
    build_structured_mesh,
    l_shape,
    unit_square,
)


@pytest.fixture
def square():
    return unit_square()


@pytest.fixture
def l_domain():
    """L-shape with Dirichlet data on x=0 and y=0 only."""
    return l_shape(neumann_edges=(1, 2, 3, 4), junction_tag=NodeTag.NEUMANN)


@pytest.fixture
def square_mesh(square):
    return build_structured_mesh(square, 0.25, order=1)


@pytest.fixture
def square_cloud(square):
    return build_node_cloud(square, 0.25)


@pytest.fixture
def config(tmp_path, monkeypatch):
    monkeypatch.setenv("FEMRBF_DATA_DIR", str(tmp_path))
    for name in ("FEMRBF_FINAL_TIME", "FEMRBF_PINV_RTOL", "FEMRBF_WORKERS"):
        monkeypatch.delenv(name, raising=False)
    from config import Config
    return Config(tmp_path / "out")
