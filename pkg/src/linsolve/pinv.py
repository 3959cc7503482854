import logging
import time
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from src.exceptions import EmptyMatrix, ShapeMismatch

OVERFLOW_LIMIT = 1e300


@dataclass
class SolveReport:
    condition_number: float
    rank: int
    truncated_singular_values: int
    wall_time: float
    overflow: bool = False


def _ratio(s: np.ndarray) -> Tuple[float, bool]:
    """sigma_max / sigma_min with an overflow flag when the ratio is not representable."""
    smax, smin = float(s[0]), float(s[-1])
    if smax == 0.0:
        return float("inf"), True
    if smin == 0.0 or smax / OVERFLOW_LIMIT > smin:
        return float("inf"), True
    return smax / smin, False


class PseudoInverse:
    """SVD-based Moore-Penrose inverse, factored once and applied to many right-hand sides."""

    def __init__(self, matrix: np.ndarray, rtol: Optional[float] = None):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.size == 0:
            raise EmptyMatrix(f"Cannot factor a matrix of shape {matrix.shape}")
        start = time.perf_counter()
        m, n = matrix.shape
        self.shape = (m, n)
        self.rtol = rtol if rtol is not None else max(m, n) * np.finfo(float).eps
        try:
            u, s, vt = linalg.svd(matrix, full_matrices=False, lapack_driver="gesdd")
        except np.linalg.LinAlgError:
            logging.debug("gesdd did not converge, retrying with gesvd")
            u, s, vt = linalg.svd(matrix, full_matrices=False, lapack_driver="gesvd")
        keep = s > self.rtol * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
        self._u = u[:, keep]
        self._s_inv = 1.0 / s[keep]
        self._vt = vt[keep]
        self.singular_values = s
        condition, overflow = _ratio(s)
        self.report = SolveReport(
            condition_number=condition,
            rank=int(keep.sum()),
            truncated_singular_values=int((~keep).sum()),
            wall_time=time.perf_counter() - start,
            overflow=overflow,
        )
        if overflow:
            logging.warning(f"Condition number overflow for a {m}x{n} system (rank {self.report.rank})")

    def apply(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.shape[0]:
            raise ShapeMismatch(f"Right-hand side of length {b.shape[0]} for a {self.shape} matrix")
        start = time.perf_counter()
        x = self._vt.T @ (self._s_inv * (self._u.T @ b))
        self.report.wall_time += time.perf_counter() - start
        return x


def pinv_solve(A: np.ndarray, b: np.ndarray, rtol: Optional[float] = None) -> Tuple[np.ndarray, SolveReport]:
    """x = A^+ b, treating singular values below rtol * sigma_max as zero."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise EmptyMatrix(f"Cannot solve with a matrix of shape {A.shape}")
    if np.asarray(b).shape[0] != A.shape[0]:
        raise ShapeMismatch(f"Right-hand side of length {np.asarray(b).shape[0]} for a {A.shape} matrix")
    op = PseudoInverse(A, rtol)
    x = op.apply(b)
    return x, op.report


def condition_number(A: np.ndarray) -> float:
    """sigma_max / sigma_min, ``inf`` when the ratio overflows."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise EmptyMatrix(f"Cannot measure a matrix of shape {A.shape}")
    s = linalg.svd(A, compute_uv=False)
    return _ratio(s)[0]
