import math
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np

from src.exceptions import LengthMismatch, MetricsError, UncoveredDomain
from src.fem import QuadratureRule, quad_rule
from src.geometry import TriMesh

MRE_FLOOR = 1e-12
COVERAGE_TOL = 1e-8


@dataclass
class ErrorReport:
    """Error measures of one field, one row of the comparison tables."""
    lse: float
    rmse: float
    mre: float
    l2: float = math.nan
    condition_number: float = math.nan
    runtime_s: float = 0.0
    shape_parameter: Optional[float] = None
    tps_beta: Optional[int] = None
    mre_floor: float = MRE_FLOOR

    def __post_init__(self):
        for name in ("lse", "rmse", "mre"):
            value = getattr(self, name)
            if value < 0:
                raise MetricsError(f"{name} must be nonnegative, got {value}")

    def as_row(self) -> Dict[str, Any]:
        return {
            "LSE": self.lse,
            "L2": self.l2,
            "RMSE": self.rmse,
            "MRE": self.mre,
            "CN": self.condition_number,
            "RT": self.runtime_s,
            "OSP": self.shape_parameter,
            "TPS_beta": self.tps_beta,
        }

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _pair(numeric, exact):
    numeric = np.asarray(numeric, dtype=float).ravel()
    exact = np.asarray(exact, dtype=float).ravel()
    if len(numeric) != len(exact) or len(numeric) == 0:
        raise LengthMismatch(f"Cannot compare {len(numeric)} values with {len(exact)}")
    return numeric, exact


def rmse(numeric, exact) -> float:
    numeric, exact = _pair(numeric, exact)
    return float(np.sqrt(np.mean((numeric - exact) ** 2)))


def max_relative_error(numeric, exact, floor: float = MRE_FLOOR) -> float:
    numeric, exact = _pair(numeric, exact)
    return float(np.max(np.abs(numeric - exact) / np.maximum(np.abs(exact), floor)))


def surface_values(mesh: TriMesh, surface: Callable, rule: QuadratureRule) -> np.ndarray:
    """Surface values at each element's quadrature points, shape (elements, points).

    Objects exposing ``element_values(mesh, rule)`` (finite element fields)
    are asked directly; plain callables are evaluated at the mapped points.
    """
    if hasattr(surface, "element_values"):
        return np.asarray(surface.element_values(mesh, rule), dtype=float)
    xq = rule.mapped_points(mesh.vertices)
    values = surface(xq[..., 0], xq[..., 1])
    return np.broadcast_to(np.asarray(values, dtype=float), xq.shape[:2])


def _check_mesh(mesh: TriMesh, rule: QuadratureRule) -> None:
    if rule.degree < 2:
        raise MetricsError(f"Volume quadrature needs degree >= 2, got {rule.degree}")
    if mesh.domain is not None:
        covered = mesh.total_area()
        if abs(covered - mesh.domain.area) > COVERAGE_TOL:
            raise UncoveredDomain(
                f"Elements cover {covered:.12g}, domain area is {mesh.domain.area}"
            )


def element_volumes(mesh: TriMesh, surface: Callable, rule: Optional[QuadratureRule] = None) -> np.ndarray:
    """Integral of the surface over each element: sum_k w_k |J_e| u(x_k)."""
    rule = rule or quad_rule(5)
    jac = 2.0 * np.abs(mesh.signed_areas())
    return jac * (surface_values(mesh, surface, rule) @ rule.weights)


def lse(
    imaginary_mesh: TriMesh,
    numeric_surface: Callable,
    exact: Callable,
    rule: Optional[QuadratureRule] = None,
) -> float:
    """Square root of the summed squared differences of per-element volumes."""
    rule = rule or quad_rule(5)
    _check_mesh(imaginary_mesh, rule)
    diff = element_volumes(imaginary_mesh, numeric_surface, rule) - element_volumes(imaginary_mesh, exact, rule)
    return float(np.sqrt(np.sum(diff ** 2)))


def l2_error(
    mesh: TriMesh,
    numeric_surface: Callable,
    exact: Callable,
    rule: Optional[QuadratureRule] = None,
) -> float:
    """Quadrature L2 norm of the pointwise error over the same elements."""
    rule = rule or quad_rule(5)
    _check_mesh(mesh, rule)
    diff = surface_values(mesh, numeric_surface, rule) - surface_values(mesh, exact, rule)
    jac = 2.0 * np.abs(mesh.signed_areas())
    return float(np.sqrt(np.sum(jac * ((diff ** 2) @ rule.weights))))
