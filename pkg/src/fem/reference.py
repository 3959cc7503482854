from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from src.exceptions import OutsideReferenceElement, UnsupportedDegree

_REFERENCE_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureRule:
    """Points on the reference triangle and weights summing to its area 1/2."""
    points: np.ndarray
    weights: np.ndarray
    degree: int

    def mapped_points(self, vertices: np.ndarray) -> np.ndarray:
        """Physical quadrature points for elements with the given (E, 3, 2) corners."""
        v0 = vertices[:, 0]
        e1 = vertices[:, 1] - v0
        e2 = vertices[:, 2] - v0
        xi, eta = self.points[:, 0], self.points[:, 1]
        return (
            v0[:, None, :]
            + xi[None, :, None] * e1[:, None, :]
            + eta[None, :, None] * e2[:, None, :]
        )


def _orbit(a: float) -> np.ndarray:
    """Barycentric permutations of (a, a, 1-2a) as (xi, eta) pairs."""
    b = 1.0 - 2.0 * a
    return np.array([[a, a], [b, a], [a, b]])


@lru_cache(maxsize=None)
def _rule(degree: int) -> Tuple[np.ndarray, np.ndarray]:
    if degree == 1:
        points = np.array([[1.0 / 3.0, 1.0 / 3.0]])
        weights = np.array([1.0])
    elif degree == 2:
        points = _orbit(1.0 / 6.0)
        weights = np.full(3, 1.0 / 3.0)
    elif degree in (3, 4):
        # Six-point rule exact to degree 4; degree 3 reuses it to keep weights positive.
        points = np.vstack([_orbit(0.445948490915965), _orbit(0.091576213509771)])
        weights = np.concatenate([np.full(3, 0.223381589678011), np.full(3, 0.109951743655322)])
    else:
        r15 = np.sqrt(15.0)
        points = np.vstack([
            [[1.0 / 3.0, 1.0 / 3.0]],
            _orbit((6.0 - r15) / 21.0),
            _orbit((6.0 + r15) / 21.0),
        ])
        weights = np.concatenate([
            [9.0 / 40.0],
            np.full(3, (155.0 - r15) / 1200.0),
            np.full(3, (155.0 + r15) / 1200.0),
        ])
    return points, 0.5 * weights


def quad_rule(degree: int) -> QuadratureRule:
    """Symmetric triangle rule exact for polynomials up to ``degree`` (1..5)."""
    if degree not in (1, 2, 3, 4, 5):
        raise UnsupportedDegree(f"Quadrature degree {degree} not supported (1..5)")
    points, weights = _rule(degree)
    return QuadratureRule(points.copy(), weights.copy(), degree)


def edge_rule(n_points: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre points on [0, 1] with weights summing to 1."""
    s, w = np.polynomial.legendre.leggauss(n_points)
    return 0.5 * (s + 1.0), 0.5 * w


@dataclass(frozen=True)
class ReferenceElement:
    """Lagrange basis of order 1 or 2 on {xi >= 0, eta >= 0, xi + eta <= 1}."""
    order: int = 1

    def __post_init__(self):
        if self.order not in (1, 2):
            raise UnsupportedDegree(f"Element order {self.order} not supported")

    @property
    def n_basis(self) -> int:
        return 3 if self.order == 1 else 6

    @property
    def nodes(self) -> np.ndarray:
        vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        if self.order == 1:
            return vertices
        return np.vstack([vertices, [[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]]])

    def values(self, points: np.ndarray) -> np.ndarray:
        """Basis values, shape (n_points, n_basis)."""
        pts = np.atleast_2d(points)
        lam = np.column_stack([1.0 - pts[:, 0] - pts[:, 1], pts[:, 0], pts[:, 1]])
        if self.order == 1:
            return lam
        l0, l1, l2 = lam.T
        return np.column_stack([
            l0 * (2 * l0 - 1),
            l1 * (2 * l1 - 1),
            l2 * (2 * l2 - 1),
            4 * l0 * l1,
            4 * l1 * l2,
            4 * l2 * l0,
        ])

    def gradients(self, points: np.ndarray) -> np.ndarray:
        """Reference gradients, shape (n_points, n_basis, 2)."""
        pts = np.atleast_2d(points)
        dlam = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
        if self.order == 1:
            return np.broadcast_to(dlam, (len(pts), 3, 2)).copy()
        lam = np.column_stack([1.0 - pts[:, 0] - pts[:, 1], pts[:, 0], pts[:, 1]])
        grads = np.empty((len(pts), 6, 2))
        for a in range(3):
            grads[:, a] = (4 * lam[:, a] - 1)[:, None] * dlam[a]
        for k, (a, b) in enumerate(((0, 1), (1, 2), (2, 0))):
            grads[:, 3 + k] = 4 * (lam[:, b, None] * dlam[a] + lam[:, a, None] * dlam[b])
        return grads


def shape_eval(elem: ReferenceElement, xi_eta) -> Tuple[np.ndarray, np.ndarray]:
    """Basis values and reference gradients at one point of the reference triangle."""
    xi, eta = float(xi_eta[0]), float(xi_eta[1])
    if xi < -_REFERENCE_TOL or eta < -_REFERENCE_TOL or xi + eta > 1.0 + _REFERENCE_TOL:
        raise OutsideReferenceElement(f"({xi}, {eta}) is outside the reference triangle")
    point = np.array([[xi, eta]])
    return elem.values(point)[0], elem.gradients(point)[0]
