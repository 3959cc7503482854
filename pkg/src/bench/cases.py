import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from src.exceptions import InvalidCase
from src.metrics import ErrorReport
from src.timestep.backward_euler import TimeConfig
from .catalog import Example

SHAPE_RULES = ("hardy", "franke")


class Method(str, Enum):
    FEM1 = "FEM1"
    FEM2 = "FEM2"
    RBF_MQ = "RBF-MQ"
    RBF_TPS = "RBF-TPS"

    @property
    def is_rbf(self) -> bool:
        return self in (Method.RBF_MQ, Method.RBF_TPS)

    @property
    def label(self) -> str:
        return {
            Method.FEM1: "FEM O(1)",
            Method.FEM2: "FEM O(2)",
            Method.RBF_MQ: "RBFCM-MQ",
            Method.RBF_TPS: "RBFCM-TPS",
        }[self]


def parse_spacing(value: Any) -> float:
    """Accepts 0.25, "0.25" or "1/4"."""
    try:
        dh = float(Fraction(str(value).strip()))
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidCase(f"Invalid grid spacing {value!r}") from e
    if not dh > 0:
        raise InvalidCase(f"Grid spacing must be positive, got {value!r}")
    return dh


def spacing_label(dh: float) -> str:
    inverse = 1.0 / dh
    if abs(inverse - round(inverse)) < 1e-9:
        return f"1/{int(round(inverse))}"
    return f"{dh:g}"


@dataclass(frozen=True)
class CaseSpec:
    """One row of a comparison table: example, method and discretization settings."""
    example: Example
    method: Method
    dh: float
    random_nodes: bool = False
    seed: int = 1
    time: Optional[TimeConfig] = None
    k: float = 1.0
    tps_beta: int = 4
    fixed_c: Optional[float] = None
    shape_rule: Optional[str] = None
    rtol: Optional[float] = None
    trace: bool = False

    def __post_init__(self):
        if not self.dh > 0:
            raise InvalidCase(f"Grid spacing must be positive, got {self.dh}")
        if self.k <= 0:
            raise InvalidCase(f"Material coefficient must be positive, got {self.k}")
        if self.example.is_stokes and self.method == Method.FEM1:
            raise InvalidCase("Stokes examples use Taylor-Hood elements; choose FEM2")
        if self.random_nodes:
            if not self.method.is_rbf:
                raise InvalidCase("Random nodes are only available to the RBF methods")
            if self.example not in (Example.P_DIRNEU_L, Example.S_UNSTEADY_L):
                raise InvalidCase(f"Random nodes are not used for {self.example.value}")
        if self.example.is_unsteady and self.time is None:
            raise InvalidCase(f"{self.example.value} needs a time configuration")
        if not self.example.is_unsteady and self.time is not None:
            raise InvalidCase(f"{self.example.value} is steady; drop dt/tf")
        if self.fixed_c is not None and (self.method != Method.RBF_MQ or not self.fixed_c > 0):
            raise InvalidCase(f"fixed_c={self.fixed_c} needs the MQ method and a positive value")
        if self.shape_rule is not None and (self.method != Method.RBF_MQ or self.shape_rule not in SHAPE_RULES):
            raise InvalidCase(f"Shape rule {self.shape_rule!r} needs the MQ method and one of {SHAPE_RULES}")
        if self.method == Method.RBF_TPS and (self.tps_beta < 2 or self.tps_beta % 2):
            raise InvalidCase(f"TPS exponent must be even and >= 2, got {self.tps_beta}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], final_time_override: Optional[float] = None) -> "CaseSpec":
        """Build a case from a suite entry; unsteady examples default to dt=0.01, tf=50."""
        known = {"example", "method", "dh", "random_nodes", "seed", "dt", "tf", "k",
                 "tps_beta", "fixed_c", "shape_rule", "rtol", "trace"}
        unknown = set(data) - known
        if unknown:
            raise InvalidCase(f"Unknown case keys: {sorted(unknown)}")
        for key in ("example", "method", "dh"):
            if key not in data:
                raise InvalidCase(f"Case entry is missing '{key}'")
        try:
            example = Example(data["example"])
            method = Method(data["method"])
        except ValueError as e:
            raise InvalidCase(str(e)) from e

        time = None
        if example.is_unsteady:
            defaults = TimeConfig()
            final_time = data.get("tf", defaults.final_time)
            if final_time_override is not None:
                final_time = final_time_override
            time = TimeConfig(float(data.get("dt", defaults.dt)), float(final_time))
        elif "dt" in data or "tf" in data:
            raise InvalidCase(f"{example.value} is steady; drop dt/tf")

        return cls(
            example=example,
            method=method,
            dh=parse_spacing(data["dh"]),
            random_nodes=bool(data.get("random_nodes", False)),
            seed=int(data.get("seed", 1)),
            time=time,
            k=float(data.get("k", 1.0)),
            tps_beta=int(data.get("tps_beta", 4)),
            fixed_c=None if data.get("fixed_c") is None else float(data["fixed_c"]),
            shape_rule=data.get("shape_rule"),
            rtol=None if data.get("rtol") is None else float(data["rtol"]),
            trace=bool(data.get("trace", False)),
        )

    @property
    def key(self) -> Tuple:
        """Deterministic ordering of suite output."""
        return (
            list(Example).index(self.example),
            list(Method).index(self.method),
            self.random_nodes,
            -self.dh,
            self.seed,
            self.fixed_c or 0.0,
        )

    @property
    def label(self) -> str:
        label = self.method.label
        return f"{label}*" if self.random_nodes else label

    @property
    def dh_label(self) -> str:
        return spacing_label(self.dh)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "example": self.example.value,
            "method": self.method.value,
            "dh": self.dh,
            "random_nodes": self.random_nodes,
            "seed": self.seed,
            "k": self.k,
            "tps_beta": self.tps_beta,
            "fixed_c": self.fixed_c,
            "shape_rule": self.shape_rule,
            "rtol": self.rtol,
            "trace": self.trace,
        }
        if self.time is not None:
            data.update({"dt": self.time.dt, "tf": self.time.final_time})
        return data


RESULT_COLUMNS = [
    "example", "dh", "method", "field", "n_nodes",
    "LSE", "L2", "RMSE", "MRE", "CN", "RT", "OSP",
    "residual", "flagged", "status", "error",
]


@dataclass
class ResultRow:
    """Error reports of one case, one entry per solution field."""
    case: CaseSpec
    reports: Dict[str, ErrorReport] = field(default_factory=dict)
    n_nodes: int = 0
    residual: float = math.nan
    flagged: bool = False
    status: str = "ok"
    error: str = ""
    optimizer_trace: Optional[pd.DataFrame] = None
    time_trace: Optional[pd.DataFrame] = None
    geometry: Optional[Dict[str, Any]] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @classmethod
    def failed(cls, case: CaseSpec, error: Exception) -> "ResultRow":
        return cls(case=case, status="failed", error=f"{type(error).__name__}: {error}")

    def to_records(self) -> List[Dict[str, Any]]:
        base = {
            "example": self.case.example.value,
            "dh": self.case.dh_label,
            "method": self.case.label,
            "n_nodes": self.n_nodes,
            "residual": self.residual,
            "flagged": self.flagged,
            "status": self.status,
            "error": self.error,
        }
        if not self.reports:
            return [{**base, "field": ""}]
        return [{**base, "field": name, **report.as_row()} for name, report in self.reports.items()]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case": self.case.to_dict(),
            "reports": {name: asdict(report) for name, report in self.reports.items()},
            "n_nodes": self.n_nodes,
            "residual": self.residual,
            "flagged": self.flagged,
            "status": self.status,
            "error": self.error,
        }
