import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.exceptions import InvalidCase, ShapeMismatch
from src.fem import AssembledSystem
from src.linsolve import PseudoInverse, SolveReport


@dataclass(frozen=True)
class TimeConfig:
    dt: float = 0.01
    final_time: float = 50.0

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidCase(f"Time step must be positive, got {self.dt}")
        n = round(self.final_time / self.dt)
        if n < 1 or abs(n * self.dt - self.final_time) > 1e-9 * max(1.0, self.final_time):
            raise InvalidCase(f"Final time {self.final_time} is not a multiple of dt={self.dt}")

    @property
    def n_steps(self) -> int:
        return int(round(self.final_time / self.dt))

    def times(self) -> np.ndarray:
        return self.dt * np.arange(1, self.n_steps + 1)


@dataclass
class TransientOperator:
    """Time-invariant pieces of M du/dt + A u = b.

    Rows outside ``time_rows`` are algebraic (boundary or continuity rows)
    and are enforced at full strength every step.
    """
    mass: np.ndarray
    matrix: np.ndarray
    time_rows: np.ndarray

    def __post_init__(self):
        self.mass = np.asarray(self.mass, dtype=float)
        self.matrix = np.asarray(self.matrix, dtype=float)
        self.time_rows = np.asarray(self.time_rows, dtype=bool)
        n = self.matrix.shape[0]
        if self.mass.shape != self.matrix.shape or self.matrix.shape != (n, n) or self.time_rows.shape != (n,):
            raise ShapeMismatch(
                f"Mass {self.mass.shape}, matrix {self.matrix.shape}, time rows {self.time_rows.shape}"
            )

    def implicit_matrix(self, dt: float) -> np.ndarray:
        return np.where(self.time_rows[:, None], self.mass + dt * self.matrix, self.matrix)

    def implicit_rhs(self, rhs: np.ndarray, prev: np.ndarray, dt: float) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        prev = np.asarray(prev, dtype=float)
        if rhs.shape != self.time_rows.shape or prev.shape != self.time_rows.shape:
            raise ShapeMismatch(f"rhs {rhs.shape} and state {prev.shape} for {len(self.time_rows)} rows")
        return np.where(self.time_rows, dt * rhs + self.mass @ prev, rhs)


class BackwardEulerStepper:
    """Factors (M + dt A) once and applies it every step."""

    def __init__(self, op: TransientOperator, dt: float, rtol: Optional[float] = None):
        self.op = op
        self.dt = dt
        self.system = op.implicit_matrix(dt)
        self._pinv = PseudoInverse(self.system, rtol)

    @property
    def report(self) -> SolveReport:
        return self._pinv.report

    def step(self, rhs: np.ndarray, prev: np.ndarray) -> Tuple[np.ndarray, float]:
        """Next state and its relative residual."""
        full_rhs = self.op.implicit_rhs(rhs, prev, self.dt)
        state = self._pinv.apply(full_rhs)
        scale = max(float(np.max(np.abs(full_rhs))), np.finfo(float).tiny)
        residual = float(np.max(np.abs(self.system @ state - full_rhs))) / scale
        return state, residual


def step_poisson(
    M: np.ndarray,
    K: np.ndarray,
    F: np.ndarray,
    u_prev: np.ndarray,
    dt: float,
    time_rows: Optional[np.ndarray] = None,
    rtol: Optional[float] = None,
) -> np.ndarray:
    """One backward Euler step (M + dt K) u = dt F + M u_prev.

    With ``time_rows`` given, the other rows solve K u = F directly.
    """
    n = np.shape(K)[0]
    if time_rows is None:
        time_rows = np.ones(n, dtype=bool)
    op = TransientOperator(M, K, time_rows)
    state, _ = BackwardEulerStepper(op, dt, rtol).step(F, u_prev)
    return state


def stokes_operator(system: AssembledSystem, velocity_mass: Optional[np.ndarray] = None) -> TransientOperator:
    """Block operator diag(M, M, 0) with the momentum rows as time rows."""
    mass = getattr(system, "mass", None)
    time_rows = getattr(system, "time_rows", None)
    if mass is None or time_rows is None:
        if velocity_mass is None:
            raise ShapeMismatch("Stokes stepping needs a velocity mass matrix")
        n_u = system.n_u
        if velocity_mass.shape != (n_u, n_u):
            raise ShapeMismatch(f"Velocity mass {velocity_mass.shape} for {n_u} velocity nodes")
        n = len(system.rhs)
        mass = np.zeros((n, n))
        mass[:n_u, :n_u] = velocity_mass
        mass[n_u:2 * n_u, n_u:2 * n_u] = velocity_mass
        time_rows = np.zeros(n, dtype=bool)
        time_rows[:2 * n_u] = True
        time_rows[system.constrained_rows] = False
        mass[system.constrained_rows] = 0.0
    return TransientOperator(mass, system.matrix, time_rows)


def step_stokes(
    system: AssembledSystem,
    state_prev: np.ndarray,
    dt: float,
    velocity_mass: Optional[np.ndarray] = None,
    rtol: Optional[float] = None,
) -> np.ndarray:
    """One implicit Stokes step; continuity and boundary rows are not scaled by dt."""
    op = stokes_operator(system, velocity_mass)
    state, _ = BackwardEulerStepper(op, dt, rtol).step(system.rhs, state_prev)
    return state


@dataclass
class TransientResult:
    state: np.ndarray
    final_time: float
    n_steps: int
    report: SolveReport
    max_residual: float
    trace: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=["step", "t", "rmse"]))


def integrate(
    op: TransientOperator,
    rhs_at: Callable[[float], np.ndarray],
    initial: np.ndarray,
    time: TimeConfig,
    rtol: Optional[float] = None,
    monitor: Optional[Callable[[np.ndarray, float], float]] = None,
) -> TransientResult:
    """March from t=0 to the final time; ``monitor`` feeds the optional per-step RMSE trace."""
    stepper = BackwardEulerStepper(op, time.dt, rtol)
    state = np.asarray(initial, dtype=float)
    rows: List[dict] = []
    max_residual = 0.0
    for step, t in enumerate(time.times(), start=1):
        state, residual = stepper.step(rhs_at(float(t)), state)
        max_residual = max(max_residual, residual)
        if monitor is not None:
            rows.append({"step": step, "t": float(t), "rmse": monitor(state, float(t))})
        if step % 1000 == 0:
            logging.debug(f"Step {step}/{time.n_steps}, t={t:.4g}, residual {residual:.3e}")
    trace = pd.DataFrame(rows, columns=["step", "t", "rmse"])
    return TransientResult(state, float(time.final_time), time.n_steps, stepper.report, max_residual, trace)
