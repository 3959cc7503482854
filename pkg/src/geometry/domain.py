import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import GeometryError, NormalAmbiguous, NotOnBoundary

Point = Tuple[float, float]

BOUNDARY_TOL = 1e-12


class DomainShape(str, Enum):
    UNIT_SQUARE = "unit_square"
    L_SHAPE = "l_shape"
    BI_UNIT_SQUARE = "bi_unit_square"


class BoundaryKind(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


class NodeTag(str, Enum):
    INTERIOR = "interior"
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


# Counter-clockwise outlines; edge i runs from vertex i to vertex i+1.
_OUTLINES: Dict[DomainShape, Tuple[Point, ...]] = {
    DomainShape.UNIT_SQUARE: ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)),
    DomainShape.L_SHAPE: (
        (0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.5, 0.5), (0.5, 1.0), (0.0, 1.0)
    ),
    DomainShape.BI_UNIT_SQUARE: ((-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)),
}

# Removed quadrant of the bounding box, as ((x_lo, x_hi), (y_lo, y_hi)).
_CUTOUTS: Dict[DomainShape, Tuple[Point, Point]] = {
    DomainShape.L_SHAPE: ((0.5, 1.0), (0.5, 1.0)),
}

_AREAS = {
    DomainShape.UNIT_SQUARE: 1.0,
    DomainShape.L_SHAPE: 0.75,
    DomainShape.BI_UNIT_SQUARE: 4.0,
}


@dataclass(frozen=True)
class Segment:
    """Straight piece of the boundary carrying one condition type."""
    start: Point
    end: Point
    kind: BoundaryKind

    @property
    def length(self) -> float:
        return float(np.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1]))

    @property
    def normal(self) -> np.ndarray:
        """Outward unit normal, valid because outlines run counter-clockwise."""
        dx = self.end[0] - self.start[0]
        dy = self.end[1] - self.start[1]
        return np.array([dy, -dx]) / self.length

    def distance(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        a = np.asarray(self.start)
        d = np.asarray(self.end) - a
        s = np.clip(((pts - a) @ d) / (d @ d), 0.0, 1.0)
        closest = a + s[:, None] * d
        return np.linalg.norm(pts - closest, axis=1)

    def contains(self, p: Sequence[float], tol: float = BOUNDARY_TOL) -> bool:
        return bool(self.distance(np.asarray(p, dtype=float))[0] <= tol)


@dataclass(frozen=True)
class DomainSpec:
    """Computational domain with its boundary split into Dirichlet and Neumann segments.

    ``junction_tag`` decides the tag of points shared by a Dirichlet and a
    Neumann segment.
    """
    shape: DomainShape
    dirichlet_segments: Tuple[Segment, ...]
    neumann_segments: Tuple[Segment, ...] = ()
    junction_tag: NodeTag = NodeTag.DIRICHLET

    def __post_init__(self):
        if self.junction_tag == NodeTag.INTERIOR:
            raise GeometryError("junction_tag must be Dirichlet or Neumann")
        self._check_coverage()

    @classmethod
    def from_edges(
        cls,
        shape: DomainShape,
        neumann_edges: Sequence[int] = (),
        junction_tag: NodeTag = NodeTag.DIRICHLET,
    ) -> "DomainSpec":
        """Build a domain whose outline edges are Dirichlet except the listed indices."""
        outline = _OUTLINES[shape]
        n = len(outline)
        bad = [i for i in neumann_edges if not 0 <= i < n]
        if bad:
            raise GeometryError(f"Edge indices {bad} out of range for {shape.value}")
        dirichlet, neumann = [], []
        for i in range(n):
            a, b = outline[i], outline[(i + 1) % n]
            if i in neumann_edges:
                neumann.append(Segment(a, b, BoundaryKind.NEUMANN))
            else:
                dirichlet.append(Segment(a, b, BoundaryKind.DIRICHLET))
        return cls(shape, tuple(dirichlet), tuple(neumann), junction_tag)

    @property
    def outline(self) -> Tuple[Point, ...]:
        return _OUTLINES[self.shape]

    @property
    def segments(self) -> Tuple[Segment, ...]:
        return self.dirichlet_segments + self.neumann_segments

    @property
    def area(self) -> float:
        return _AREAS[self.shape]

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        xs = [v[0] for v in self.outline]
        ys = [v[1] for v in self.outline]
        return min(xs), max(xs), min(ys), max(ys)

    @property
    def perimeter(self) -> float:
        outline = self.outline
        return sum(
            float(np.hypot(b[0] - a[0], b[1] - a[1]))
            for a, b in zip(outline, outline[1:] + outline[:1])
        )

    def _check_coverage(self) -> None:
        outline = self.outline
        edges = list(zip(outline, outline[1:] + outline[:1]))
        spans: Dict[int, List[Tuple[float, float]]] = {}
        for seg in self.segments:
            for i, (a, b) in enumerate(edges):
                edge = Segment(a, b, seg.kind)
                if edge.contains(seg.start) and edge.contains(seg.end):
                    d = np.subtract(b, a)
                    t0 = float(np.dot(np.subtract(seg.start, a), d) / np.dot(d, d))
                    t1 = float(np.dot(np.subtract(seg.end, a), d) / np.dot(d, d))
                    spans.setdefault(i, []).append((min(t0, t1), max(t0, t1)))
                    break
            else:
                raise GeometryError(f"Segment {seg.start}->{seg.end} is not on the boundary")

        for intervals in spans.values():
            intervals.sort()
            for (_, hi), (lo, _) in zip(intervals, intervals[1:]):
                if lo < hi - 1e-9:
                    raise GeometryError("Boundary segments overlap")

        total = sum(seg.length for seg in self.segments)
        if abs(total - self.perimeter) > 1e-9:
            raise GeometryError(
                f"Boundary segments cover length {total}, perimeter is {self.perimeter}"
            )

    def contains(self, points: np.ndarray, closed: bool = True, tol: float = BOUNDARY_TOL) -> np.ndarray:
        """Vectorized membership test for the closed (default) or open domain."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        x, y = pts[:, 0], pts[:, 1]
        x0, x1, y0, y1 = self.bounds
        if closed:
            inside = (x >= x0 - tol) & (x <= x1 + tol) & (y >= y0 - tol) & (y <= y1 + tol)
        else:
            inside = (x > x0 + tol) & (x < x1 - tol) & (y > y0 + tol) & (y < y1 - tol)
        cut = _CUTOUTS.get(self.shape)
        if cut is not None:
            (cx0, _), (cy0, _) = cut
            if closed:
                inside &= ~((x > cx0 + tol) & (y > cy0 + tol))
            else:
                inside &= ~((x >= cx0 - tol) & (y >= cy0 - tol))
        return inside

    def distance_to_boundary(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.min(np.stack([seg.distance(pts) for seg in self.segments]), axis=0)

    def segments_at(self, p: Sequence[float], tol: float = BOUNDARY_TOL) -> List[Segment]:
        return [seg for seg in self.segments if seg.contains(p, tol)]

    def tag_point(self, p: Sequence[float]) -> NodeTag:
        kinds = {seg.kind for seg in self.segments_at(p)}
        if not kinds:
            return NodeTag.INTERIOR
        if kinds == {BoundaryKind.DIRICHLET}:
            return NodeTag.DIRICHLET
        if kinds == {BoundaryKind.NEUMANN}:
            return NodeTag.NEUMANN
        return self.junction_tag

    def tag_points(self, points: np.ndarray) -> List[NodeTag]:
        return [self.tag_point(p) for p in np.atleast_2d(points)]


def _distinct_normals(segments: Sequence[Segment]) -> List[np.ndarray]:
    normals: List[np.ndarray] = []
    for seg in segments:
        n = seg.normal
        if not any(np.allclose(n, m, atol=1e-12) for m in normals):
            normals.append(n)
    return normals


def boundary_normal(domain: DomainSpec, p: Sequence[float]) -> np.ndarray:
    """Outward unit normal of the boundary segment containing ``p``."""
    segs = domain.segments_at(p)
    if not segs:
        raise NotOnBoundary(f"Point {tuple(p)} is not on the boundary of {domain.shape.value}")
    normals = _distinct_normals(segs)
    if len(normals) > 1:
        raise NormalAmbiguous(f"Point {tuple(p)} is a corner of {domain.shape.value}")
    return normals[0]


def collocation_normal(
    domain: DomainSpec, p: Sequence[float], kind: Optional[BoundaryKind] = BoundaryKind.NEUMANN
) -> np.ndarray:
    """Normal used for flux rows, defined at corners as well.

    Prefers the segments of ``kind``; at a corner between two of them the
    normalized sum of their normals is returned.
    """
    segs = domain.segments_at(p)
    if not segs:
        raise NotOnBoundary(f"Point {tuple(p)} is not on the boundary of {domain.shape.value}")
    preferred = [seg for seg in segs if kind is None or seg.kind == kind] or segs
    normals = _distinct_normals(preferred)
    if len(normals) == 1:
        return normals[0]
    total = np.sum(normals, axis=0)
    logging.debug(f"Corner normal at {tuple(p)} from {len(normals)} segments")
    return total / np.linalg.norm(total)


def unit_square() -> DomainSpec:
    return DomainSpec.from_edges(DomainShape.UNIT_SQUARE)


def bi_unit_square() -> DomainSpec:
    return DomainSpec.from_edges(DomainShape.BI_UNIT_SQUARE)


def l_shape(neumann_edges: Sequence[int] = (), junction_tag: NodeTag = NodeTag.DIRICHLET) -> DomainSpec:
    """L-shaped domain; edges 0..5 run bottom, right, cut-out bottom, cut-out side, top, left."""
    return DomainSpec.from_edges(DomainShape.L_SHAPE, neumann_edges, junction_tag)
