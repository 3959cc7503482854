from dataclasses import dataclass

import numpy as np

from src.exceptions import FemError
from src.geometry import TriMesh
from .reference import QuadratureRule, ReferenceElement


@dataclass
class FemField:
    """Finite element interpolant of nodal values on a mesh."""
    mesh: TriMesh
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != self.mesh.n_nodes:
            raise FemError(f"{len(self.values)} values for a mesh of {self.mesh.n_nodes} nodes")

    def element_values(self, mesh: TriMesh, rule: QuadratureRule) -> np.ndarray:
        """Values at the quadrature points of every element, shape (elements, points)."""
        if mesh is not self.mesh and not np.array_equal(mesh.triangles[:, :3], self.mesh.triangles[:, :3]):
            return self(*np.moveaxis(rule.mapped_points(mesh.vertices), -1, 0))
        phi = ReferenceElement(self.mesh.order).values(rule.points)
        return self.values[self.mesh.triangles] @ phi.T

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Point evaluation by locating the containing element."""
        x = np.asarray(x, dtype=float)
        pts = np.column_stack([x.ravel(), np.asarray(y, dtype=float).ravel()])
        v = self.mesh.vertices
        jac = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]], axis=-1)
        inv = np.linalg.inv(jac)
        # Reference coordinates of every point in every element, shape (points, elements, 2).
        ref = np.einsum("eij,pej->pei", inv, pts[:, None, :] - v[None, :, 0, :])
        slack = np.minimum(np.minimum(ref[..., 0], ref[..., 1]), 1.0 - ref[..., 0] - ref[..., 1])
        owner = np.argmax(slack, axis=1)
        rows = np.arange(len(pts))
        if np.any(slack[rows, owner] < -1e-9):
            raise FemError("Evaluation point lies outside the mesh")
        phi = ReferenceElement(self.mesh.order).values(ref[rows, owner])
        out = np.sum(phi * self.values[self.mesh.triangles[owner]], axis=1)
        return out.reshape(x.shape)
