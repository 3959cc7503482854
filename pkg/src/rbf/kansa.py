import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from src.exceptions import GeometryError, MissingPressureClosure, PinNodeNotFound, RbfError
from src.fem import AssembledSystem, DirichletData, Layout, NeumannData, PressurePin
from src.geometry import BoundaryKind, NodeCloud, collocation_normal
from .kernels import RbfKind, rbf_eval, rbf_gradient, rbf_laplacian


@dataclass
class Coefficients:
    """Expansion u(x) = sum_j alpha_j phi(||x - x_j||) + offset."""
    alpha: np.ndarray
    centers: np.ndarray
    kind: RbfKind
    offset: float = 0.0

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.centers = np.asarray(self.centers, dtype=float).reshape(-1, 2)
        if len(self.alpha) != len(self.centers):
            raise RbfError(f"{len(self.alpha)} coefficients for {len(self.centers)} centers")

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        points = np.column_stack([x.ravel(), np.asarray(y, dtype=float).ravel()])
        return evaluate_solution(self, points).reshape(x.shape)


@dataclass
class KansaSystem(AssembledSystem):
    """Collocation system; ``mass`` holds the phi rows of the time-derivative term."""
    row_blocks: Dict[str, slice] = field(default_factory=dict)
    mass: Optional[np.ndarray] = None
    time_rows: Optional[np.ndarray] = None


def offsets(points: np.ndarray, centers: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Componentwise x_i - x_j for evaluation points i and centers j."""
    points = np.atleast_2d(points)
    centers = np.atleast_2d(centers)
    return points[:, None, 0] - centers[None, :, 0], points[:, None, 1] - centers[None, :, 1]


def interpolation_matrix(points: np.ndarray, centers: np.ndarray, kind: RbfKind) -> np.ndarray:
    dx, dy = offsets(points, centers)
    return rbf_eval(kind, np.hypot(dx, dy))


def evaluate_solution(coeffs: Coefficients, points: np.ndarray) -> np.ndarray:
    return interpolation_matrix(points, coeffs.centers, coeffs.kind) @ coeffs.alpha + coeffs.offset


def boundary_normals(cloud: NodeCloud) -> np.ndarray:
    if len(cloud.neumann) == 0:
        return np.empty((0, 2))
    if cloud.domain is None:
        raise GeometryError("Neumann collocation needs the cloud's domain for normals")
    return np.array([collocation_normal(cloud.domain, p, BoundaryKind.NEUMANN) for p in cloud.neumann])


def _values(fn: Callable, n: int, *args) -> np.ndarray:
    return np.broadcast_to(np.asarray(fn(*args), dtype=float), (n,)).astype(float)


def kansa_poisson_rhs(
    cloud: NodeCloud,
    f: Callable,
    dir: Optional[DirichletData],
    neu: Optional[NeumannData] = None,
    t: float = 0.0,
    normals: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Right-hand side at time t in Dirichlet, Neumann, interior row order."""
    blocks = cloud.row_blocks
    rhs = np.empty(cloud.n_total)
    if len(cloud.dirichlet):
        if dir is None:
            raise RbfError("Cloud has Dirichlet nodes but no Dirichlet data was given")
        rhs[blocks["dirichlet"]] = _values(dir, len(cloud.dirichlet), cloud.dirichlet[:, 0], cloud.dirichlet[:, 1], t)
    if len(cloud.neumann):
        if neu is None:
            raise RbfError("Cloud has Neumann nodes but no Neumann data was given")
        normals = boundary_normals(cloud) if normals is None else normals
        rhs[blocks["neumann"]] = neu(cloud.neumann[:, 0], cloud.neumann[:, 1], t, normals[:, 0], normals[:, 1])
    rhs[blocks["interior"]] = _values(f, len(cloud.interior), cloud.interior[:, 0], cloud.interior[:, 1], t)
    return rhs


def assemble_kansa_poisson(
    cloud: NodeCloud,
    kind: RbfKind,
    k: float,
    f: Callable,
    dir: Optional[DirichletData],
    neu: Optional[NeumannData] = None,
    t: float = 0.0,
) -> KansaSystem:
    """Rows: phi on Dirichlet nodes, dphi/dn on Neumann nodes, -k*Laplace(phi) inside."""
    if k <= 0:
        raise RbfError(f"Material coefficient must be positive, got {k}")
    points = cloud.points
    n = len(points)
    blocks = cloud.row_blocks
    d_rows, n_rows, i_rows = blocks["dirichlet"], blocks["neumann"], blocks["interior"]
    dx, dy = offsets(points, points)
    phi = rbf_eval(kind, np.hypot(dx, dy))
    normals = boundary_normals(cloud)

    matrix = np.empty((n, n))
    matrix[d_rows] = phi[d_rows]
    if len(cloud.neumann):
        gx, gy = rbf_gradient(kind, dx[n_rows], dy[n_rows])
        matrix[n_rows] = gx * normals[:, 0, None] + gy * normals[:, 1, None]
    matrix[i_rows] = -k * rbf_laplacian(kind, dx[i_rows], dy[i_rows])
    rhs = kansa_poisson_rhs(cloud, f, dir, neu, t, normals)

    mass = np.zeros((n, n))
    mass[i_rows] = phi[i_rows]
    time_rows = np.zeros(n, dtype=bool)
    time_rows[i_rows] = True
    return KansaSystem(
        matrix, rhs, Layout.POISSON_SCALAR, np.arange(n),
        constrained_rows=np.arange(i_rows.start),
        row_blocks=blocks, mass=mass, time_rows=time_rows,
    )


def pin_node(cloud: NodeCloud, pin: PressurePin) -> int:
    dist = np.linalg.norm(cloud.points - np.asarray(pin.point, dtype=float), axis=1)
    j = int(np.argmin(dist))
    if dist[j] > 1e-9:
        raise PinNodeNotFound(f"No collocation node at {pin.point}")
    return j


def kansa_stokes_rhs(
    cloud: NodeCloud,
    f: Callable,
    dir: Optional[DirichletData],
    natural: Optional[Callable] = None,
    pin: Optional[PressurePin] = None,
    t: float = 0.0,
    normals: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Right-hand side of the 3N collocation rows at time t; continuity rows are zero."""
    n = cloud.n_total
    blocks = cloud.row_blocks
    d_rows, n_rows, i_rows = blocks["dirichlet"], blocks["neumann"], blocks["interior"]
    rhs = np.zeros(3 * n)
    if len(cloud.dirichlet):
        if dir is None:
            raise RbfError("Cloud has Dirichlet nodes but no velocity data was given")
        vx, vy = dir(cloud.dirichlet[:, 0], cloud.dirichlet[:, 1], t)
        for offset, values in ((0, vx), (n, vy)):
            rhs[offset + d_rows.start:offset + d_rows.stop] = np.broadcast_to(values, (len(cloud.dirichlet),))
    if len(cloud.neumann) and natural is not None:
        normals = boundary_normals(cloud) if normals is None else normals
        tx, ty = natural(cloud.neumann[:, 0], cloud.neumann[:, 1], t, normals[:, 0], normals[:, 1])
        for offset, traction in ((0, tx), (n, ty)):
            rhs[offset + n_rows.start:offset + n_rows.stop] = np.broadcast_to(traction, (len(cloud.neumann),))
    fx, fy = f(cloud.interior[:, 0], cloud.interior[:, 1], t)
    for offset, source in ((0, fx), (n, fy)):
        rhs[offset + i_rows.start:offset + i_rows.stop] = np.broadcast_to(source, (len(cloud.interior),))
    if pin is not None:
        rhs[2 * n + pin_node(cloud, pin)] = pin.value
    return rhs


def assemble_kansa_stokes(
    cloud: NodeCloud,
    kind: RbfKind,
    f: Callable,
    dir: Optional[DirichletData],
    natural: Optional[Callable] = None,
    pin: Optional[PressurePin] = None,
    t: float = 0.0,
) -> KansaSystem:
    """3N x 3N collocation of steady Stokes over unknowns (alpha_ux, alpha_uy, alpha_p).

    Neumann-tagged nodes carry natural rows du/dn - p n = traction, with
    ``natural(x, y, t, nx, ny) -> (tx, ty)`` defaulting to zero traction.
    """
    if pin is None and len(cloud.neumann) == 0:
        raise MissingPressureClosure("Stokes collocation needs a pressure pin or a natural boundary")
    points = cloud.points
    n = len(points)
    blocks = cloud.row_blocks
    d_rows, n_rows, i_rows = blocks["dirichlet"], blocks["neumann"], blocks["interior"]
    dx, dy = offsets(points, points)
    phi = rbf_eval(kind, np.hypot(dx, dy))
    gx, gy = rbf_gradient(kind, dx, dy)
    lap = rbf_laplacian(kind, dx[i_rows], dy[i_rows])
    normals = boundary_normals(cloud)

    ux, uy, p = slice(0, n), slice(n, 2 * n), slice(2 * n, 3 * n)
    matrix = np.zeros((3 * n, 3 * n))

    for offset, cols in ((0, ux), (n, uy)):
        matrix[offset + d_rows.start:offset + d_rows.stop, cols] = phi[d_rows]

    if len(cloud.neumann):
        flux = gx[n_rows] * normals[:, 0, None] + gy[n_rows] * normals[:, 1, None]
        for offset, cols, component in ((0, ux, 0), (n, uy, 1)):
            rows = slice(offset + n_rows.start, offset + n_rows.stop)
            matrix[rows, cols] = flux
            matrix[rows, p] = -phi[n_rows] * normals[:, component, None]

    for offset, cols, grad in ((0, ux, gx), (n, uy, gy)):
        rows = slice(offset + i_rows.start, offset + i_rows.stop)
        matrix[rows, cols] = -lap
        matrix[rows, p] = grad[i_rows]

    matrix[p, ux] = gx
    matrix[p, uy] = gy
    constrained = [np.arange(i_rows.start), n + np.arange(i_rows.start)]
    if pin is not None:
        j = pin_node(cloud, pin)
        matrix[2 * n + j] = 0.0
        matrix[2 * n + j, p] = phi[j]
        constrained.append(np.array([2 * n + j]))
    rhs = kansa_stokes_rhs(cloud, f, dir, natural, pin, t, normals)

    mass = np.zeros((3 * n, 3 * n))
    time_rows = np.zeros(3 * n, dtype=bool)
    for offset, cols in ((0, ux), (n, uy)):
        rows = slice(offset + i_rows.start, offset + i_rows.stop)
        mass[rows, cols] = phi[i_rows]
        time_rows[rows] = True

    row_blocks = {"continuity": p}
    for name, offset in (("x", 0), ("y", n)):
        for block in ("dirichlet", "neumann", "interior"):
            s = blocks[block]
            row_blocks[f"{name}.{block}"] = slice(offset + s.start, offset + s.stop)
    logging.debug(f"Kansa Stokes system {3 * n}x{3 * n} with {kind.label}")
    return KansaSystem(
        matrix, rhs, Layout.STOKES_BLOCK, np.arange(3 * n),
        constrained_rows=np.concatenate(constrained).astype(int), n_u=n, n_p=n,
        row_blocks=row_blocks, mass=mass, time_rows=time_rows,
    )
