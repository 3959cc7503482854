from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from src.exceptions import RbfError, SingularDerivative


class RbfFamily(str, Enum):
    MQ = "MQ"
    TPS = "TPS"


@dataclass(frozen=True)
class RbfKind:
    """Multiquadric sqrt(r^2 + c^2) or thin plate spline r^beta ln r."""
    family: RbfFamily
    shape: float = 1.0
    beta: int = 1

    def __post_init__(self):
        if self.family == RbfFamily.MQ:
            if not self.shape > 0:
                raise RbfError(f"MQ shape parameter must be positive, got {self.shape}")
            if self.beta != 1:
                raise RbfError("MQ is used with beta = 1 only")
        elif self.beta <= 0 or self.beta % 2:
            raise RbfError(f"TPS exponent must be a positive even integer, got {self.beta}")

    @classmethod
    def mq(cls, c: float) -> "RbfKind":
        return cls(RbfFamily.MQ, shape=float(c), beta=1)

    @classmethod
    def tps(cls, beta: int = 4) -> "RbfKind":
        return cls(RbfFamily.TPS, shape=0.0, beta=int(beta))

    @property
    def label(self) -> str:
        if self.family == RbfFamily.MQ:
            return f"MQ(c={self.shape:.4g})"
        return f"TPS(beta={self.beta})"


def _safe_radius(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    positive = r > 0
    return np.where(positive, r, 1.0), positive


def rbf_eval(kind: RbfKind, r):
    r = np.asarray(r, dtype=float)
    if kind.family == RbfFamily.MQ:
        out = np.sqrt(r ** 2 + kind.shape ** 2)
    else:
        rs, positive = _safe_radius(r)
        out = np.where(positive, rs ** kind.beta * np.log(rs), 0.0)
    return out if out.ndim else float(out)


def rbf_gradient(kind: RbfKind, dx, dy) -> Tuple[np.ndarray, np.ndarray]:
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    r = np.hypot(dx, dy)
    if kind.family == RbfFamily.MQ:
        phi = np.sqrt(r ** 2 + kind.shape ** 2)
        return dx / phi, dy / phi
    rs, positive = _safe_radius(r)
    beta = kind.beta
    g = np.where(positive, rs ** (beta - 2) * (beta * np.log(rs) + 1.0), 0.0)
    return dx * g, dy * g


def rbf_second(kind: RbfKind, dx, dy) -> Tuple[np.ndarray, np.ndarray]:
    """Pure second derivatives (d2/dx2, d2/dy2)."""
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    r = np.hypot(dx, dy)
    if kind.family == RbfFamily.MQ:
        c2 = kind.shape ** 2
        phi3 = np.sqrt(r ** 2 + c2) ** 3
        return (dy ** 2 + c2) / phi3, (dx ** 2 + c2) / phi3
    rs, positive = _safe_radius(r)
    beta = kind.beta
    if beta == 2 and not np.all(positive):
        raise SingularDerivative("TPS with beta = 2 has a log-singular Laplacian at r = 0")
    log_r = np.log(rs)
    g = rs ** (beta - 2) * (beta * log_r + 1.0)
    h = rs ** (beta - 4) * ((beta - 2) * (beta * log_r + 1.0) + beta)
    dxx = np.where(positive, g + dx ** 2 * h, 0.0)
    dyy = np.where(positive, g + dy ** 2 * h, 0.0)
    return dxx, dyy


def rbf_laplacian(kind: RbfKind, dx, dy) -> np.ndarray:
    dxx, dyy = rbf_second(kind, dx, dy)
    return dxx + dyy


def rbf_derivs(kind: RbfKind, dx, dy):
    """(d/dx, d/dy, d2/dx2, d2/dy2) of phi(||(dx, dy)||)."""
    gx, gy = rbf_gradient(kind, dx, dy)
    dxx, dyy = rbf_second(kind, dx, dy)
    out = (gx, gy, dxx, dyy)
    if np.ndim(gx) == 0:
        return tuple(float(v) for v in out)
    return out
