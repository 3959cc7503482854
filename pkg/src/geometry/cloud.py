import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.spatial import Delaunay, QhullError, cKDTree
from scipy.spatial.distance import pdist

from src.exceptions import DegenerateCloud, GeometryError, SeparationUnsatisfiable
from .domain import DomainSpec, NodeTag
from .mesh import TriMesh, build_structured_mesh, reorder_nodes

MIN_POINT_DISTANCE = 1e-12
MIN_TRIANGLE_AREA = 1e-14


@dataclass(frozen=True)
class RandomCloudConfig:
    seed: int = 1
    min_separation: Optional[float] = None  # 0.25 * dh when unset
    max_attempts: int = 1_000_000


@dataclass
class NodeCloud:
    """Collocation points grouped by boundary type.

    ``points`` stacks Dirichlet, Neumann and interior points in that order,
    which is also the row order of the collocation systems.
    """
    interior: np.ndarray
    dirichlet: np.ndarray
    neumann: np.ndarray
    domain: Optional[DomainSpec] = None
    spacing: Optional[float] = None
    random: bool = False

    def __post_init__(self):
        self.interior = np.asarray(self.interior, dtype=float).reshape(-1, 2)
        self.dirichlet = np.asarray(self.dirichlet, dtype=float).reshape(-1, 2)
        self.neumann = np.asarray(self.neumann, dtype=float).reshape(-1, 2)
        pts = self.points
        if len(pts) > 1 and pdist(pts).min() <= MIN_POINT_DISTANCE:
            raise GeometryError("Node cloud contains coincident points")

    @property
    def points(self) -> np.ndarray:
        return np.vstack([self.dirichlet, self.neumann, self.interior])

    @property
    def n_total(self) -> int:
        return len(self.interior) + len(self.dirichlet) + len(self.neumann)

    @property
    def tags(self) -> Tuple[NodeTag, ...]:
        return (
            (NodeTag.DIRICHLET,) * len(self.dirichlet)
            + (NodeTag.NEUMANN,) * len(self.neumann)
            + (NodeTag.INTERIOR,) * len(self.interior)
        )

    @property
    def row_blocks(self) -> Dict[str, slice]:
        nd, nn = len(self.dirichlet), len(self.neumann)
        return {
            "dirichlet": slice(0, nd),
            "neumann": slice(nd, nd + nn),
            "interior": slice(nd + nn, self.n_total),
        }

    def counts(self) -> Dict[str, int]:
        return {
            "interior": len(self.interior),
            "dirichlet": len(self.dirichlet),
            "neumann": len(self.neumann),
        }

    def to_json(self) -> Dict:
        return {
            "nodes": self.points.tolist(),
            "tags": [t.value for t in self.tags],
            "random": self.random,
        }


def build_node_cloud(domain: DomainSpec, dh: float) -> NodeCloud:
    """Uniform cloud on the nodes of the order-1 structured mesh."""
    mesh = build_structured_mesh(domain, dh, order=1)
    return NodeCloud(
        interior=mesh.nodes[mesh.tag_mask(NodeTag.INTERIOR)],
        dirichlet=mesh.nodes[mesh.tag_mask(NodeTag.DIRICHLET)],
        neumann=mesh.nodes[mesh.tag_mask(NodeTag.NEUMANN)],
        domain=domain,
        spacing=dh,
    )


def build_random_cloud(domain: DomainSpec, dh: float, cfg: RandomCloudConfig = RandomCloudConfig()) -> NodeCloud:
    """Uniform boundary points with interior points drawn at random inside the domain.

    Interior points keep ``min_separation`` from each other and from the
    boundary.
    """
    uniform = build_node_cloud(domain, dh)
    separation = cfg.min_separation if cfg.min_separation is not None else 0.25 * dh
    target = len(uniform.interior)
    rng = np.random.default_rng(cfg.seed)
    x0, x1, y0, y1 = domain.bounds

    accepted = np.empty((0, 2))
    attempts = 0
    while len(accepted) < target:
        if attempts >= cfg.max_attempts:
            raise SeparationUnsatisfiable(
                f"Placed {len(accepted)}/{target} points after {attempts} attempts "
                f"with separation {separation}"
            )
        attempts += 1
        p = np.array([rng.uniform(x0, x1), rng.uniform(y0, y1)])
        if not domain.contains(p, closed=False)[0]:
            continue
        if domain.distance_to_boundary(p)[0] < separation:
            continue
        if len(accepted) and np.min(np.linalg.norm(accepted - p, axis=1)) < separation:
            continue
        accepted = np.vstack([accepted, p])

    logging.debug(f"Random cloud seed={cfg.seed}: {target} interior points in {attempts} attempts")
    return NodeCloud(
        interior=accepted,
        dirichlet=uniform.dirichlet,
        neumann=uniform.neumann,
        domain=domain,
        spacing=dh,
        random=True,
    )


def _ghost_points(domain: DomainSpec, dh: float) -> np.ndarray:
    """Grid points of the bounding box lying outside the closed domain.

    They pin the boundary edges of a non-convex domain into the Delaunay
    triangulation; triangles touching them are discarded afterwards.
    """
    x0, x1, y0, y1 = domain.bounds
    nx = int(round((x1 - x0) / dh))
    ny = int(round((y1 - y0) / dh))
    gx, gy = np.meshgrid(x0 + (x1 - x0) * np.arange(nx + 1) / nx, y0 + (y1 - y0) * np.arange(ny + 1) / ny)
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    return grid[~domain.contains(grid, closed=True)]


def _orient_ccw(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    v = points[triangles]
    e1 = v[:, 1] - v[:, 0]
    e2 = v[:, 2] - v[:, 0]
    negative = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) < 0
    triangles = triangles.copy()
    triangles[negative] = triangles[negative][:, [0, 2, 1]]
    return triangles


def triangulate_cloud(cloud: NodeCloud) -> TriMesh:
    """Imaginary elements over a node cloud, numbered like ``cloud.points``."""
    points = cloud.points
    if len(points) < 3:
        raise DegenerateCloud(f"Need at least 3 points, got {len(points)}")

    if not cloud.random and cloud.domain is not None and cloud.spacing is not None:
        mesh = build_structured_mesh(cloud.domain, cloud.spacing, order=1)
        dist, match = cKDTree(mesh.nodes).query(points)
        if dist.max() > 1e-9 or len(set(match.tolist())) != len(points):
            raise GeometryError("Uniform cloud does not match its structured mesh")
        return reorder_nodes(mesh, match)

    n_real = len(points)
    candidates = points
    if cloud.domain is not None and cloud.spacing is not None:
        candidates = np.vstack([points, _ghost_points(cloud.domain, cloud.spacing)])
    try:
        simplices = Delaunay(candidates).simplices
    except QhullError as e:
        raise DegenerateCloud(f"Delaunay triangulation failed: {e}") from e

    keep = np.all(simplices < n_real, axis=1)
    if cloud.domain is not None:
        centroids = candidates[simplices].mean(axis=1)
        keep &= cloud.domain.contains(centroids, closed=False)
    triangles = _orient_ccw(points, simplices[keep])

    v = points[triangles]
    e1 = v[:, 1] - v[:, 0]
    e2 = v[:, 2] - v[:, 0]
    areas = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    if len(areas) == 0 or areas.min() <= MIN_TRIANGLE_AREA:
        raise DegenerateCloud("Triangulation produced zero-area triangles")
    return TriMesh(points, triangles, cloud.tags, order=1, domain=cloud.domain)
