"""Manufactured-solution catalog: analytic fields, sources and boundary data of the five examples."""
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from src.exceptions import OutsideDomain
from src.fem import DirichletData, NeumannData, PressurePin
from src.geometry import DomainSpec, NodeTag, bi_unit_square, l_shape, unit_square

Fields = Dict[str, np.ndarray]


class Example(str, Enum):
    P_DIR = "P-Dir"
    P_DIRNEU_L = "P-DirNeu-L"
    P_UNSTEADY = "P-Unsteady"
    S_COLLIDING = "S-Colliding"
    S_UNSTEADY_L = "S-Unsteady-L"

    @property
    def is_stokes(self) -> bool:
        return self in (Example.S_COLLIDING, Example.S_UNSTEADY_L)

    @property
    def is_unsteady(self) -> bool:
        return self in (Example.P_UNSTEADY, Example.S_UNSTEADY_L)

    @property
    def fields(self) -> Tuple[str, ...]:
        return ("u_x", "u_y", "p") if self.is_stokes else ("u",)


def example_domain(example: Example) -> DomainSpec:
    if example in (Example.P_DIR, Example.P_UNSTEADY):
        return unit_square()
    if example == Example.P_DIRNEU_L:
        # Dirichlet on x=0 and y=0 only; their far ends count as Neumann nodes.
        return l_shape(neumann_edges=(1, 2, 3, 4), junction_tag=NodeTag.NEUMANN)
    if example == Example.S_COLLIDING:
        return bi_unit_square()
    return l_shape(neumann_edges=(1,))


def physical_spacing(example: Example, dh: float) -> float:
    """Grid spacing on the example's domain; the colliding-flow rows are labelled at half spacing."""
    return 2.0 * dh if example == Example.S_COLLIDING else dh


def pressure_pin(example: Example) -> Optional[PressurePin]:
    if example == Example.S_COLLIDING:
        return PressurePin((1.0, 1.0), float(_fields(example, np.array(1.0), np.array(1.0), 0.0)["p"]))
    return None


def _fields(example: Example, x, y, t: float) -> Fields:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if example == Example.P_DIR:
        return {"u": np.sin(np.pi * x) * np.cos(np.pi * y / 2)}
    if example == Example.P_DIRNEU_L:
        return {"u": y * np.exp(-x ** 2) + np.sin(np.pi * x) * np.cos(np.pi * y)}
    if example == Example.P_UNSTEADY:
        return {"u": np.exp(-x / (y + 1)) + 0.8 * t}
    if example == Example.S_COLLIDING:
        return {
            "u_x": 20 * x * y ** 3,
            "u_y": 5 * x ** 4 - 5 * y ** 4,
            "p": 60 * x ** 2 * y - 20 * y ** 3,
        }
    ones = np.ones_like(x + y)
    return {
        "u_x": (t + 1) * ones - y ** 3 + 0 * x,
        "u_y": -x ** 3 + 3 * x ** 2 - 3 * x + 0 * y,
        "p": -6 * x * y - x + 6 * y + 1,
    }


def _gradients(example: Example, x, y, t: float) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    zero = np.zeros_like(x + y)
    if example == Example.P_DIR:
        return {"u": (
            np.pi * np.cos(np.pi * x) * np.cos(np.pi * y / 2),
            -np.pi / 2 * np.sin(np.pi * x) * np.sin(np.pi * y / 2),
        )}
    if example == Example.P_DIRNEU_L:
        return {"u": (
            -2 * x * y * np.exp(-x ** 2) + np.pi * np.cos(np.pi * x) * np.cos(np.pi * y),
            np.exp(-x ** 2) - np.pi * np.sin(np.pi * x) * np.sin(np.pi * y),
        )}
    if example == Example.P_UNSTEADY:
        s = y + 1
        e = np.exp(-x / s)
        return {"u": (-e / s, x * e / s ** 2)}
    if example == Example.S_COLLIDING:
        return {
            "u_x": (20 * y ** 3 + zero, 60 * x * y ** 2),
            "u_y": (20 * x ** 3 + zero, -20 * y ** 3 + zero),
        }
    return {
        "u_x": (zero, -3 * y ** 2 + zero),
        "u_y": (-3 * x ** 2 + 6 * x - 3 + zero, zero),
    }


def _check_inside(example: Example, x, y) -> None:
    points = np.column_stack([np.ravel(x), np.ravel(y)])
    inside = example_domain(example).contains(points, closed=True)
    if not np.all(inside):
        bad = points[~inside][0]
        raise OutsideDomain(f"Point ({bad[0]}, {bad[1]}) is outside the {example.value} domain")


def analytic_solution(example: Example, x, y, t: float = 0.0) -> Fields:
    """Exact fields keyed 'u' or 'u_x', 'u_y', 'p'."""
    _check_inside(example, x, y)
    return _fields(example, x, y, t)


def analytic_gradient(example: Example, x, y, t: float = 0.0) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    _check_inside(example, x, y)
    return _gradients(example, x, y, t)


def source_term(example: Example, x, y, t: float = 0.0):
    """f = du/dt - Laplace(u) for Poisson, (f_x, f_y) = du/dt - Laplace(u) + grad(p) for Stokes."""
    _check_inside(example, x, y)
    return _source(example, x, y, t)


def _source(example: Example, x, y, t: float):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if example == Example.P_DIR:
        return 1.25 * np.pi ** 2 * np.sin(np.pi * x) * np.cos(np.pi * y / 2)
    if example == Example.P_DIRNEU_L:
        return y * np.exp(-x ** 2) * (2 - 4 * x ** 2) + 2 * np.pi ** 2 * np.sin(np.pi * x) * np.cos(np.pi * y)
    if example == Example.P_UNSTEADY:
        s = y + 1
        e = np.exp(-x / s)
        return 0.8 - e / s ** 2 - x * e * (x - 2 * y - 2) / s ** 4
    if example == Example.S_COLLIDING:
        lap_x, lap_y = 120 * x * y, 60 * x ** 2 - 60 * y ** 2
        dp_dx, dp_dy = 120 * x * y, 60 * x ** 2 - 60 * y ** 2
        return -lap_x + dp_dx, -lap_y + dp_dy
    du_dt = 1.0
    lap_x, lap_y = -6 * y, -6 * x + 6
    dp_dx, dp_dy = -6 * y - 1, -6 * x + 6
    return du_dt - lap_x + dp_dx, -lap_y + dp_dy


def dirichlet_data(example: Example) -> DirichletData:
    if example.is_stokes:
        def velocity(x, y, t):
            values = _fields(example, x, y, t)
            return values["u_x"], values["u_y"]
        return DirichletData(velocity)
    return DirichletData(lambda x, y, t: _fields(example, x, y, t)["u"])


def neumann_data(example: Example) -> NeumannData:
    """du/dn from the analytic gradient."""
    def flux(x, y, t, nx, ny):
        gx, gy = _gradients(example, x, y, t)["u"]
        return gx * nx + gy * ny
    return NeumannData(flux)


def natural_traction(example: Example) -> Callable:
    """(du_x/dn - p n_x, du_y/dn - p n_y) from the analytic fields."""
    def traction(x, y, t, nx, ny):
        grads = _gradients(example, x, y, t)
        p = _fields(example, x, y, t)["p"]
        (ux_x, ux_y), (uy_x, uy_y) = grads["u_x"], grads["u_y"]
        return ux_x * nx + ux_y * ny - p * nx, uy_x * nx + uy_y * ny - p * ny
    return traction


def exact_callable(example: Example, field: str, t: float = 0.0) -> Callable:
    return lambda x, y: _fields(example, x, y, t)[field]


def source_callable(example: Example) -> Callable:
    """Source f(x, y, t) for assembly, skipping the domain check at quadrature points."""
    return lambda x, y, t: _source(example, x, y, t)
