import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import FemError, PinNodeNotFound
from src.geometry import NodeTag, TriMesh
from .reference import QuadratureRule, ReferenceElement, edge_rule, quad_rule

VOLUME_DEGREE = 5


@dataclass(frozen=True)
class DirichletData:
    """Boundary values u_D(x, y, t); a pair (u_x, u_y) for velocity data."""
    value: Callable[[np.ndarray, np.ndarray, float], Any]

    def __call__(self, x: np.ndarray, y: np.ndarray, t: float = 0.0):
        return self.value(x, y, t)


@dataclass(frozen=True)
class NeumannData:
    """Normal derivative du/dn evaluated at (x, y, t, nx, ny)."""
    flux: Callable[..., np.ndarray]

    def __call__(self, x, y, t, nx, ny) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.flux(x, y, t, nx, ny), dtype=float), np.shape(x))


@dataclass(frozen=True)
class PressurePin:
    point: Tuple[float, float]
    value: float


class Layout(str, Enum):
    POISSON_SCALAR = "poisson_scalar"
    STOKES_BLOCK = "stokes_block"


@dataclass
class AssembledSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    layout: Layout
    dof_map: np.ndarray
    constrained_rows: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    n_u: int = 0
    n_p: int = 0

    @property
    def blocks(self) -> Dict[str, slice]:
        if self.layout == Layout.POISSON_SCALAR:
            return {"u": slice(0, len(self.rhs))}
        return {
            "u_x": slice(0, self.n_u),
            "u_y": slice(self.n_u, 2 * self.n_u),
            "p": slice(2 * self.n_u, 2 * self.n_u + self.n_p),
        }


def _evaluate(fn: Callable, shape: Tuple[int, ...], *args) -> np.ndarray:
    return np.broadcast_to(np.asarray(fn(*args), dtype=float), shape).astype(float)


def _geometry(mesh: TriMesh) -> Tuple[np.ndarray, np.ndarray]:
    """Absolute Jacobian determinants and inverse Jacobians of the affine element maps."""
    v = mesh.vertices
    jac = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]], axis=-1)
    return np.abs(np.linalg.det(jac)), np.linalg.inv(jac)


def _physical_gradients(elem: ReferenceElement, rule: QuadratureRule, inv_jac: np.ndarray) -> np.ndarray:
    """Basis gradients in physical coordinates, shape (elements, points, basis, 2)."""
    return np.einsum("qbj,eji->eqbi", elem.gradients(rule.points), inv_jac)


def _scatter(n_rows: int, n_cols: int, rows: np.ndarray, cols: np.ndarray, local: np.ndarray) -> np.ndarray:
    out = np.zeros((n_rows, n_cols))
    np.add.at(out, (rows[:, :, None], cols[:, None, :]), local)
    return out


def assemble_stiffness(mesh: TriMesh, k: float = 1.0, rule: Optional[QuadratureRule] = None) -> np.ndarray:
    """Stiffness matrix of -k*Laplace before boundary conditions."""
    rule = rule or quad_rule(VOLUME_DEGREE)
    det, inv = _geometry(mesh)
    grads = _physical_gradients(ReferenceElement(mesh.order), rule, inv)
    local = k * np.einsum("q,e,eqai,eqbi->eab", rule.weights, det, grads, grads)
    return _scatter(mesh.n_nodes, mesh.n_nodes, mesh.triangles, mesh.triangles, local)


def assemble_mass(mesh: TriMesh, rule: Optional[QuadratureRule] = None) -> np.ndarray:
    rule = rule or quad_rule(VOLUME_DEGREE)
    det, _ = _geometry(mesh)
    phi = ReferenceElement(mesh.order).values(rule.points)
    local = np.einsum("q,e,qa,qb->eab", rule.weights, det, phi, phi)
    return _scatter(mesh.n_nodes, mesh.n_nodes, mesh.triangles, mesh.triangles, local)


def assemble_load(mesh: TriMesh, f: Callable, t: float = 0.0, rule: Optional[QuadratureRule] = None) -> np.ndarray:
    """Load vector of a scalar source f(x, y, t)."""
    rule = rule or quad_rule(VOLUME_DEGREE)
    det, _ = _geometry(mesh)
    phi = ReferenceElement(mesh.order).values(rule.points)
    xq = rule.mapped_points(mesh.vertices)
    values = _evaluate(f, xq.shape[:2], xq[..., 0], xq[..., 1], t)
    local = np.einsum("q,e,eq,qa->ea", rule.weights, det, values, phi)
    b = np.zeros(mesh.n_nodes)
    np.add.at(b, mesh.triangles, local)
    return b


def _edge_basis(order: int, s: np.ndarray) -> np.ndarray:
    if order == 1:
        return np.column_stack([1.0 - s, s])
    return np.column_stack([(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)])


def assemble_neumann(
    mesh: TriMesh,
    neu: Optional[NeumannData],
    k: float = 1.0,
    t: float = 0.0,
    constrained: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Surface terms k * int(du/dn * v) over boundary edges carrying an unconstrained node."""
    b = np.zeros(mesh.n_nodes)
    if neu is None:
        return b
    edges = mesh.boundary_edges()
    if constrained is None:
        constrained = mesh.tag_mask(NodeTag.DIRICHLET)
    edge_nodes = edges if mesh.order == 2 else edges[:, :2]
    free = ~np.all(constrained[edge_nodes], axis=1)
    edge_nodes = edge_nodes[free]
    if len(edge_nodes) == 0:
        return b

    pa = mesh.nodes[edge_nodes[:, 0]]
    pb = mesh.nodes[edge_nodes[:, 1]]
    d = pb - pa
    length = np.linalg.norm(d, axis=1)
    normal = np.column_stack([d[:, 1], -d[:, 0]]) / length[:, None]

    s, w = edge_rule(3)
    xq = pa[:, None, :] + s[None, :, None] * d[:, None, :]
    g = neu(xq[..., 0], xq[..., 1], t, normal[:, 0, None], normal[:, 1, None])
    local = k * np.einsum("s,k,ks,sa->ka", w, length, g, _edge_basis(mesh.order, s))
    np.add.at(b, edge_nodes, local)
    return b


def _replace_rows(matrix: np.ndarray, rows: np.ndarray, cols: Optional[np.ndarray] = None) -> None:
    cols = rows if cols is None else cols
    matrix[rows, :] = 0.0
    matrix[rows, cols] = 1.0


def poisson_rhs(
    mesh: TriMesh,
    k: float,
    f: Callable,
    dir: Optional[DirichletData],
    neu: Optional[NeumannData] = None,
    t: float = 0.0,
) -> np.ndarray:
    """Right-hand side at time t with Dirichlet values in the constrained rows."""
    rows = mesh.indices(NodeTag.DIRICHLET)
    b = assemble_load(mesh, f, t) + assemble_neumann(mesh, neu, k, t)
    if len(rows):
        if dir is None:
            raise FemError("Mesh has Dirichlet nodes but no Dirichlet data was given")
        x, y = mesh.nodes[rows, 0], mesh.nodes[rows, 1]
        b[rows] = _evaluate(dir, x.shape, x, y, t)
    return b


def assemble_poisson(
    mesh: TriMesh,
    k: float,
    f: Callable,
    dir: Optional[DirichletData],
    neu: Optional[NeumannData] = None,
    t: float = 0.0,
) -> AssembledSystem:
    if k <= 0:
        raise FemError(f"Material coefficient must be positive, got {k}")
    matrix = assemble_stiffness(mesh, k)
    rhs = poisson_rhs(mesh, k, f, dir, neu, t)
    rows = mesh.indices(NodeTag.DIRICHLET)
    _replace_rows(matrix, rows)
    return AssembledSystem(matrix, rhs, Layout.POISSON_SCALAR, np.arange(mesh.n_nodes), rows)


def _check_taylor_hood(mesh_v: TriMesh, mesh_p: TriMesh) -> None:
    if mesh_v.order != 2 or mesh_p.order != 1:
        raise FemError("Stokes assembly needs an order-2 velocity mesh and an order-1 pressure mesh")
    n_p = mesh_p.n_nodes
    if (
        mesh_v.n_elements != mesh_p.n_elements
        or not np.array_equal(mesh_v.triangles[:, :3], mesh_p.triangles)
        or not np.allclose(mesh_v.nodes[:n_p], mesh_p.nodes)
    ):
        raise FemError("Pressure mesh is not the vertex sub-mesh of the velocity mesh")


def divergence_blocks(mesh_v: TriMesh, n_p: int, rule: Optional[QuadratureRule] = None) -> Tuple[np.ndarray, np.ndarray]:
    """L_x, L_y with entries int(dphi_i/dx * psi_j), int(dphi_i/dy * psi_j)."""
    rule = rule or quad_rule(VOLUME_DEGREE)
    det, inv = _geometry(mesh_v)
    grads = _physical_gradients(ReferenceElement(2), rule, inv)
    psi = ReferenceElement(1).values(rule.points)
    local = np.einsum("q,e,eqai,qb->ieab", rule.weights, det, grads, psi)
    rows = mesh_v.triangles
    cols = mesh_v.triangles[:, :3]
    return (
        _scatter(mesh_v.n_nodes, n_p, rows, cols, local[0]),
        _scatter(mesh_v.n_nodes, n_p, rows, cols, local[1]),
    )


def _pin_index(mesh_p: TriMesh, pin: PressurePin) -> int:
    dist = np.linalg.norm(mesh_p.nodes - np.asarray(pin.point, dtype=float), axis=1)
    j = int(np.argmin(dist))
    if dist[j] > 1e-9:
        raise PinNodeNotFound(f"No pressure node at {pin.point}")
    return j


def stokes_constrained_rows(mesh_v: TriMesh, mesh_p: TriMesh, pin: Optional[PressurePin]) -> np.ndarray:
    n_u = mesh_v.n_nodes
    vel = mesh_v.indices(NodeTag.DIRICHLET)
    rows = [vel, vel + n_u]
    if pin is not None:
        rows.append(np.array([2 * n_u + _pin_index(mesh_p, pin)]))
    return np.concatenate(rows).astype(int)


def stokes_rhs(
    mesh_v: TriMesh,
    mesh_p: TriMesh,
    f: Callable,
    dir: Optional[DirichletData],
    pin: Optional[PressurePin] = None,
    t: float = 0.0,
) -> np.ndarray:
    n_u, n_p = mesh_v.n_nodes, mesh_p.n_nodes
    rule = quad_rule(VOLUME_DEGREE)
    det, _ = _geometry(mesh_v)
    phi = ReferenceElement(2).values(rule.points)
    xq = rule.mapped_points(mesh_v.vertices)
    fx, fy = f(xq[..., 0], xq[..., 1], t)
    b = np.zeros(2 * n_u + n_p)
    for offset, values in ((0, fx), (n_u, fy)):
        values = np.broadcast_to(np.asarray(values, dtype=float), xq.shape[:2])
        local = np.einsum("q,e,eq,qa->ea", rule.weights, det, values, phi)
        np.add.at(b, offset + mesh_v.triangles, local)

    vel = mesh_v.indices(NodeTag.DIRICHLET)
    if len(vel):
        if dir is None:
            raise FemError("Velocity mesh has Dirichlet nodes but no Dirichlet data was given")
        x, y = mesh_v.nodes[vel, 0], mesh_v.nodes[vel, 1]
        ux, uy = dir(x, y, t)
        b[vel] = np.broadcast_to(ux, x.shape)
        b[n_u + vel] = np.broadcast_to(uy, x.shape)
    if pin is not None:
        b[2 * n_u + _pin_index(mesh_p, pin)] = pin.value
    return b


def assemble_stokes(
    mesh_v: TriMesh,
    mesh_p: TriMesh,
    f: Callable,
    dir: Optional[DirichletData],
    pin: Optional[PressurePin] = None,
    t: float = 0.0,
) -> AssembledSystem:
    """Taylor-Hood block system [[K,0,-Lx],[0,K,-Ly],[Lx^T,Ly^T,0]].

    Natural boundaries add no surface term. With ``pin`` the continuity row
    of that pressure node is replaced by p = value.
    """
    _check_taylor_hood(mesh_v, mesh_p)
    n_u, n_p = mesh_v.n_nodes, mesh_p.n_nodes
    stiffness = assemble_stiffness(mesh_v, 1.0)
    lx, ly = divergence_blocks(mesh_v, n_p)

    u, v, p = slice(0, n_u), slice(n_u, 2 * n_u), slice(2 * n_u, 2 * n_u + n_p)
    matrix = np.zeros((2 * n_u + n_p, 2 * n_u + n_p))
    matrix[u, u] = stiffness
    matrix[v, v] = stiffness
    matrix[u, p] = -lx
    matrix[v, p] = -ly
    matrix[p, u] = lx.T
    matrix[p, v] = ly.T

    rhs = stokes_rhs(mesh_v, mesh_p, f, dir, pin, t)
    rows = stokes_constrained_rows(mesh_v, mesh_p, pin)
    _replace_rows(matrix, rows)
    dof_map = np.concatenate([np.arange(n_u), n_u + np.arange(n_u), 2 * n_u + np.arange(n_p)])
    logging.debug(f"Stokes system: {n_u} velocity nodes, {n_p} pressure nodes, {len(rows)} constrained rows")
    return AssembledSystem(matrix, rhs, Layout.STOKES_BLOCK, dof_map, rows, n_u, n_p)
