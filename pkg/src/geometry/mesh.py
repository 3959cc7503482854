import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import GeometryError, NonConformingSpacing
from .domain import DomainShape, DomainSpec, NodeTag

# (start, end, midpoint) local indices of the three element edges.
LOCAL_EDGES = ((0, 1, 3), (1, 2, 4), (2, 0, 5))


@dataclass
class TriMesh:
    """Triangulation with per-node boundary tags.

    Order-2 triangles list their vertices first, then the midpoints of
    edges (0,1), (1,2), (2,0).
    """
    nodes: np.ndarray
    triangles: np.ndarray
    node_tags: Tuple[NodeTag, ...]
    order: int = 1
    domain: Optional[DomainSpec] = None

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float).reshape(-1, 2)
        self.triangles = np.asarray(self.triangles, dtype=int).reshape(-1, 3 * self.order)
        self.node_tags = tuple(NodeTag(t) for t in self.node_tags)
        if self.order not in (1, 2):
            raise GeometryError(f"Unsupported mesh order {self.order}")
        if len(self.node_tags) != len(self.nodes):
            raise GeometryError("node_tags must have one entry per node")
        if len(self.triangles) and np.any(self.signed_areas() <= 0.0):
            raise GeometryError("Mesh contains triangles that are not positively oriented")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.triangles)

    @property
    def vertices(self) -> np.ndarray:
        """Corner coordinates, shape (elements, 3, 2)."""
        return self.nodes[self.triangles[:, :3]]

    def signed_areas(self) -> np.ndarray:
        v = self.vertices
        e1 = v[:, 1] - v[:, 0]
        e2 = v[:, 2] - v[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def total_area(self) -> float:
        return float(np.sum(np.abs(self.signed_areas())))

    def tag_mask(self, tag: NodeTag) -> np.ndarray:
        return np.array([t == tag for t in self.node_tags], dtype=bool)

    def indices(self, tag: NodeTag) -> np.ndarray:
        return np.flatnonzero(self.tag_mask(tag))

    def boundary_edges(self) -> np.ndarray:
        """Edges owned by a single triangle as rows (start, end, midpoint or -1).

        Rows keep the triangle's counter-clockwise direction, so the outward
        normal of an edge a->b is (dy, -dx).
        """
        owners: Dict[Tuple[int, int], List[Tuple[int, int, int]]] = {}
        for tri in self.triangles:
            for a, b, m in LOCAL_EDGES:
                key = tuple(sorted((int(tri[a]), int(tri[b]))))
                mid = int(tri[m]) if self.order == 2 else -1
                owners.setdefault(key, []).append((int(tri[a]), int(tri[b]), mid))
        edges = [found[0] for found in owners.values() if len(found) == 1]
        return np.array(edges, dtype=int).reshape(-1, 3)

    def vertex_submesh(self) -> "TriMesh":
        """Order-1 mesh on the vertices; vertices are numbered before midpoints."""
        if self.order == 1:
            return self
        n_vertices = int(self.triangles[:, :3].max()) + 1
        return TriMesh(
            self.nodes[:n_vertices],
            self.triangles[:, :3],
            self.node_tags[:n_vertices],
            order=1,
            domain=self.domain,
        )

    def counts(self) -> Dict[str, int]:
        return {
            "interior": int(self.tag_mask(NodeTag.INTERIOR).sum()),
            "dirichlet": int(self.tag_mask(NodeTag.DIRICHLET).sum()),
            "neumann": int(self.tag_mask(NodeTag.NEUMANN).sum()),
            "elements": self.n_elements,
        }

    def to_json(self) -> Dict:
        return {
            "nodes": self.nodes.tolist(),
            "triangles": self.triangles.tolist(),
            "tags": [t.value for t in self.node_tags],
            "order": self.order,
        }


def _cell_count(length: float, dh: float) -> int:
    if dh <= 0:
        raise NonConformingSpacing(f"Spacing must be positive, got {dh}")
    n = int(round(length / dh))
    if n < 1 or abs(n * dh - length) > 1e-9 * max(1.0, length):
        raise NonConformingSpacing(f"Spacing {dh} does not tile a length of {length}")
    return n


def build_structured_mesh(domain: DomainSpec, dh: float, order: int = 1) -> TriMesh:
    """Uniform grid of dh x dh cells, each split along its lower-left to upper-right diagonal."""
    if order not in (1, 2):
        raise GeometryError(f"Unsupported mesh order {order}")
    x0, x1, y0, y1 = domain.bounds
    nx = _cell_count(x1 - x0, dh)
    ny = _cell_count(y1 - y0, dh)
    if domain.shape == DomainShape.L_SHAPE:
        _cell_count(0.5, dh)

    xs = x0 + (x1 - x0) * np.arange(nx + 1) / nx
    ys = y0 + (y1 - y0) * np.arange(ny + 1) / ny
    gx, gy = np.meshgrid(xs, ys)
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    keep = domain.contains(grid, closed=True)

    index = -np.ones(len(grid), dtype=int)
    index[keep] = np.arange(int(keep.sum()))
    nodes: List[np.ndarray] = list(grid[keep])

    def vid(i: int, j: int) -> int:
        return int(index[j * (nx + 1) + i])

    triangles = []
    for j in range(ny):
        for i in range(nx):
            centre = np.array([(xs[i] + xs[i + 1]) / 2, (ys[j] + ys[j + 1]) / 2])
            if not domain.contains(centre, closed=False)[0]:
                continue
            ll, lr, ur, ul = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            triangles.append([ll, lr, ur])
            triangles.append([ll, ur, ul])

    if order == 2:
        midpoints: Dict[Tuple[int, int], int] = {}
        quadratic = []
        for tri in triangles:
            mids = []
            for a, b, _ in LOCAL_EDGES:
                key = tuple(sorted((tri[a], tri[b])))
                if key not in midpoints:
                    midpoints[key] = len(nodes)
                    nodes.append((nodes[tri[a]] + nodes[tri[b]]) / 2)
                mids.append(midpoints[key])
            quadratic.append(tri + mids)
        triangles = quadratic

    points = np.array(nodes)
    mesh = TriMesh(points, np.array(triangles), domain.tag_points(points), order, domain)
    logging.debug(f"Structured mesh on {domain.shape.value}, dh={dh}, order {order}: {mesh.counts()}")
    return mesh


def reorder_nodes(mesh: TriMesh, order: Sequence[int]) -> TriMesh:
    """Same mesh with nodes renumbered so that new node i is old node order[i]."""
    order = np.asarray(order, dtype=int)
    inverse = np.empty_like(order)
    inverse[order] = np.arange(len(order))
    return TriMesh(
        mesh.nodes[order],
        inverse[mesh.triangles],
        tuple(mesh.node_tags[i] for i in order),
        mesh.order,
        mesh.domain,
    )
