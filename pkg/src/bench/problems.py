"""
Discretized forms of a case: one adapter per (equation, method) pair.

Every adapter exposes the same surface to the runner, the time stepper and
the shape-parameter search: a time-invariant system matrix, a right-hand
side at any time, the transient operator, the initial state, nodal values
for RMSE/MRE and the surfaces integrated by LSE/L2.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from src.exceptions import InvalidCase
from src.fem import (
    AssembledSystem,
    FemField,
    assemble_mass,
    assemble_poisson,
    assemble_stokes,
    poisson_rhs,
    stokes_rhs,
)
from src.geometry import (
    NodeCloud,
    NodeTag,
    RandomCloudConfig,
    TriMesh,
    build_node_cloud,
    build_random_cloud,
    build_structured_mesh,
    triangulate_cloud,
)
from src.linsolve import PseudoInverse, SolveReport, pinv_solve
from src.metrics import ErrorReport, l2_error, lse, max_relative_error, rmse
from src.rbf import (
    Coefficients,
    KansaSystem,
    RbfKind,
    assemble_kansa_poisson,
    assemble_kansa_stokes,
    boundary_normals,
    interpolation_matrix,
    kansa_poisson_rhs,
    kansa_stokes_rhs,
    pin_node,
)
from src.timestep.backward_euler import TransientOperator, stokes_operator
from src.timestep.transient import run_transient
from .cases import CaseSpec, Method
from .catalog import (
    dirichlet_data,
    example_domain,
    exact_callable,
    natural_traction,
    neumann_data,
    physical_spacing,
    pressure_pin,
    source_callable,
)

Surface = Tuple[TriMesh, Callable, Callable]


class Problem(ABC):
    """A case discretized on its mesh or cloud."""

    def __init__(self, case: CaseSpec):
        self.case = case
        self.example = case.example
        self.domain = example_domain(case.example)
        self.spacing = physical_spacing(case.example, case.dh)
        self.source = source_callable(case.example)
        self.dirichlet = dirichlet_data(case.example)

    @property
    @abstractmethod
    def n_nodes(self) -> int:
        pass

    @abstractmethod
    def _assemble(self) -> AssembledSystem:
        pass

    @abstractmethod
    def rhs(self, t: float) -> np.ndarray:
        pass

    @abstractmethod
    def transient_operator(self) -> TransientOperator:
        pass

    @abstractmethod
    def initial_state(self) -> np.ndarray:
        pass

    @abstractmethod
    def nodal_values(self, state: np.ndarray, t: float) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
        """Per field: (numeric, exact) at the nodes."""

    @abstractmethod
    def surfaces(self, state: np.ndarray, t: float) -> Dict[str, Surface]:
        """Per field: (quadrature mesh, numeric surface, exact surface)."""

    @abstractmethod
    def geometry(self) -> Dict:
        """JSON export of the mesh or cloud."""

    @cached_property
    def system(self) -> AssembledSystem:
        return self._assemble()

    def error_reports(self, state: np.ndarray, t: float) -> Dict[str, ErrorReport]:
        surfaces = self.surfaces(state, t)
        reports = {}
        for name, (numeric, exact) in self.nodal_values(state, t).items():
            mesh, surface, exact_surface = surfaces[name]
            reports[name] = ErrorReport(
                lse=lse(mesh, surface, exact_surface),
                l2=l2_error(mesh, surface, exact_surface),
                rmse=rmse(numeric, exact),
                mre=max_relative_error(numeric, exact),
            )
        return reports

    def velocity_rmse(self, state: np.ndarray, t: float) -> float:
        """RMSE of u for Poisson, sum of the velocity RMSEs for Stokes."""
        values = self.nodal_values(state, t)
        names = ("u_x", "u_y") if self.example.is_stokes else ("u",)
        return float(sum(rmse(*values[name]) for name in names))


class FemPoissonProblem(Problem):
    def __init__(self, case: CaseSpec):
        super().__init__(case)
        order = 1 if case.method == Method.FEM1 else 2
        self.mesh = build_structured_mesh(self.domain, self.spacing, order=order)
        self.neumann = neumann_data(case.example) if self.mesh.tag_mask(NodeTag.NEUMANN).any() else None
        logging.info(f"FEM O({order}) mesh: {self.mesh.n_nodes} nodes, {self.mesh.n_elements} elements")

    @property
    def n_nodes(self) -> int:
        return self.mesh.n_nodes

    def _assemble(self) -> AssembledSystem:
        return assemble_poisson(self.mesh, self.case.k, self.source, self.dirichlet, self.neumann)

    def rhs(self, t: float) -> np.ndarray:
        return poisson_rhs(self.mesh, self.case.k, self.source, self.dirichlet, self.neumann, t)

    def transient_operator(self) -> TransientOperator:
        constrained = self.mesh.tag_mask(NodeTag.DIRICHLET)
        mass = assemble_mass(self.mesh)
        mass[constrained] = 0.0
        return TransientOperator(mass, self.system.matrix, ~constrained)

    def initial_state(self) -> np.ndarray:
        return exact_callable(self.example, "u", 0.0)(self.mesh.nodes[:, 0], self.mesh.nodes[:, 1])

    def nodal_values(self, state, t):
        exact = exact_callable(self.example, "u", t)(self.mesh.nodes[:, 0], self.mesh.nodes[:, 1])
        return {"u": (state, exact)}

    def surfaces(self, state, t):
        return {"u": (self.mesh, FemField(self.mesh, state), exact_callable(self.example, "u", t))}

    def geometry(self) -> Dict:
        return self.mesh.to_json()


class FemStokesProblem(Problem):
    """Taylor-Hood pair: P2 velocity on the mesh, P1 pressure on its vertices."""

    def __init__(self, case: CaseSpec):
        super().__init__(case)
        self.mesh_v = build_structured_mesh(self.domain, self.spacing, order=2)
        self.mesh_p = self.mesh_v.vertex_submesh()
        self.pin = pressure_pin(case.example)
        logging.info(
            f"Taylor-Hood mesh: {self.mesh_v.n_nodes} velocity nodes, "
            f"{self.mesh_p.n_nodes} pressure nodes, {self.mesh_v.n_elements} elements"
        )

    @property
    def n_nodes(self) -> int:
        return self.mesh_v.n_nodes

    def _assemble(self) -> AssembledSystem:
        return assemble_stokes(self.mesh_v, self.mesh_p, self.source, self.dirichlet, self.pin)

    def rhs(self, t: float) -> np.ndarray:
        return stokes_rhs(self.mesh_v, self.mesh_p, self.source, self.dirichlet, self.pin, t)

    def transient_operator(self) -> TransientOperator:
        return stokes_operator(self.system, velocity_mass=assemble_mass(self.mesh_v))

    def geometry(self) -> Dict:
        return self.mesh_v.to_json()

    def _split(self, state: np.ndarray) -> Dict[str, np.ndarray]:
        n_u = self.mesh_v.n_nodes
        return {"u_x": state[:n_u], "u_y": state[n_u:2 * n_u], "p": state[2 * n_u:]}

    def _mesh(self, name: str) -> TriMesh:
        return self.mesh_p if name == "p" else self.mesh_v

    def initial_state(self) -> np.ndarray:
        parts = []
        for name in ("u_x", "u_y", "p"):
            nodes = self._mesh(name).nodes
            parts.append(exact_callable(self.example, name, 0.0)(nodes[:, 0], nodes[:, 1]))
        return np.concatenate(parts)

    def nodal_values(self, state, t):
        out = {}
        for name, values in self._split(state).items():
            nodes = self._mesh(name).nodes
            out[name] = (values, exact_callable(self.example, name, t)(nodes[:, 0], nodes[:, 1]))
        return out

    def surfaces(self, state, t):
        return {
            name: (self._mesh(name), FemField(self._mesh(name), values), exact_callable(self.example, name, t))
            for name, values in self._split(state).items()
        }


class KansaProblem(Problem):
    """Shared cloud, kernel and imaginary-mesh handling of the collocation adapters."""

    def __init__(self, case: CaseSpec, cloud: Optional[NodeCloud] = None, shape: Optional[float] = None):
        super().__init__(case)
        self.cloud = cloud if cloud is not None else build_cloud(case)
        self.kind = kernel_for(case, shape)
        self.centers = self.cloud.points
        logging.debug(f"Kansa cloud: {self.cloud.counts()} with {self.kind.label}")

    @property
    def n_nodes(self) -> int:
        return self.cloud.n_total

    @cached_property
    def interpolation(self) -> np.ndarray:
        return interpolation_matrix(self.centers, self.centers, self.kind)

    @cached_property
    def normals(self) -> np.ndarray:
        return boundary_normals(self.cloud)

    @cached_property
    def imaginary_mesh(self) -> TriMesh:
        return triangulate_cloud(self.cloud)

    def geometry(self) -> Dict:
        data = self.cloud.to_json()
        data["imaginary_triangles"] = self.imaginary_mesh.triangles.tolist()
        return data

    def transient_operator(self) -> TransientOperator:
        system = self.system
        return TransientOperator(system.mass, system.matrix, system.time_rows)

    def _interpolate(self, names) -> np.ndarray:
        """Coefficients reproducing the exact t=0 fields at the centers."""
        solver = PseudoInverse(self.interpolation, self.case.rtol)
        x, y = self.centers[:, 0], self.centers[:, 1]
        return np.concatenate([solver.apply(exact_callable(self.example, name, 0.0)(x, y)) for name in names])

    def _fields(self, state: np.ndarray, names) -> Dict[str, np.ndarray]:
        n = self.cloud.n_total
        return {name: state[i * n:(i + 1) * n] for i, name in enumerate(names)}

    def _nodal(self, state, t, names):
        x, y = self.centers[:, 0], self.centers[:, 1]
        return {
            name: (self.interpolation @ alpha, exact_callable(self.example, name, t)(x, y))
            for name, alpha in self._fields(state, names).items()
        }

    def _surfaces(self, state, t, names):
        mesh = self.imaginary_mesh
        return {
            name: (mesh, Coefficients(alpha, self.centers, self.kind), exact_callable(self.example, name, t))
            for name, alpha in self._fields(state, names).items()
        }


class KansaPoissonProblem(KansaProblem):
    def __init__(self, case: CaseSpec, cloud: Optional[NodeCloud] = None, shape: Optional[float] = None):
        super().__init__(case, cloud, shape)
        self.neumann = neumann_data(case.example) if len(self.cloud.neumann) else None

    def _assemble(self) -> KansaSystem:
        return assemble_kansa_poisson(self.cloud, self.kind, self.case.k, self.source, self.dirichlet, self.neumann)

    def rhs(self, t: float) -> np.ndarray:
        return kansa_poisson_rhs(self.cloud, self.source, self.dirichlet, self.neumann, t, self.normals)

    def initial_state(self) -> np.ndarray:
        return self._interpolate(("u",))

    def nodal_values(self, state, t):
        return self._nodal(state, t, ("u",))

    def surfaces(self, state, t):
        return self._surfaces(state, t, ("u",))


class KansaStokesProblem(KansaProblem):
    FIELDS = ("u_x", "u_y", "p")

    def __init__(self, case: CaseSpec, cloud: Optional[NodeCloud] = None, shape: Optional[float] = None):
        super().__init__(case, cloud, shape)
        self.pin = pressure_pin(case.example)
        self.natural = natural_traction(case.example) if len(self.cloud.neumann) else None

    def _assemble(self) -> KansaSystem:
        return assemble_kansa_stokes(self.cloud, self.kind, self.source, self.dirichlet, self.natural, self.pin)

    def rhs(self, t: float) -> np.ndarray:
        return kansa_stokes_rhs(self.cloud, self.source, self.dirichlet, self.natural, self.pin, t, self.normals)

    def initial_state(self) -> np.ndarray:
        return self._interpolate(self.FIELDS)

    @cached_property
    def pin_index(self) -> Optional[int]:
        return pin_node(self.cloud, self.pin) if self.pin is not None else None

    def pressure_offset(self, state: np.ndarray) -> float:
        """Constant putting the recovered pressure on the pin value.

        The pin row is one row of a nearly singular system, so the truncated
        solve only honours it approximately.
        """
        if self.pin is None:
            return 0.0
        alpha_p = self._fields(state, self.FIELDS)["p"]
        return self.pin.value - float((self.interpolation @ alpha_p)[self.pin_index])

    def nodal_values(self, state, t):
        values = self._nodal(state, t, self.FIELDS)
        numeric, exact = values["p"]
        values["p"] = (numeric + self.pressure_offset(state), exact)
        return values

    def surfaces(self, state, t):
        surfaces = self._surfaces(state, t, self.FIELDS)
        surfaces["p"][1].offset = self.pressure_offset(state)
        return surfaces


def build_cloud(case: CaseSpec) -> NodeCloud:
    domain = example_domain(case.example)
    spacing = physical_spacing(case.example, case.dh)
    if case.random_nodes:
        return build_random_cloud(domain, spacing, RandomCloudConfig(seed=case.seed))
    return build_node_cloud(domain, spacing)


def kernel_for(case: CaseSpec, shape: Optional[float] = None) -> RbfKind:
    if case.method == Method.RBF_TPS:
        return RbfKind.tps(case.tps_beta)
    if case.method != Method.RBF_MQ:
        raise InvalidCase(f"{case.method.value} is not a collocation method")
    c = shape if shape is not None else case.fixed_c
    if c is None:
        raise InvalidCase("The MQ kernel needs a shape parameter; set fixed_c or run the optimizer")
    return RbfKind.mq(c)


def build_problem(case: CaseSpec, cloud: Optional[NodeCloud] = None, shape: Optional[float] = None) -> Problem:
    """Adapter for the case's equation and method; ``cloud``/``shape`` are reused by the optimizer."""
    if case.method.is_rbf:
        cls = KansaStokesProblem if case.example.is_stokes else KansaPoissonProblem
        return cls(case, cloud, shape)
    if case.example.is_stokes:
        return FemStokesProblem(case)
    return FemPoissonProblem(case)


@dataclass
class Solution:
    state: np.ndarray
    report: SolveReport
    residual: float
    time: float = 0.0
    trace: Optional[pd.DataFrame] = None


def solve_problem(problem: Problem, rtol: Optional[float] = None, record_trace: bool = False) -> Solution:
    """Steady solve with the pseudo-inverse, or a backward Euler run for unsteady cases."""
    case = problem.case
    if case.time is not None:
        result = run_transient(case, problem, record_trace=record_trace, rtol=rtol)
        trace = result.trace if record_trace else None
        return Solution(result.state, result.report, result.max_residual, result.final_time, trace)
    system = problem.system
    state, report = pinv_solve(system.matrix, system.rhs, rtol)
    scale = max(float(np.max(np.abs(system.rhs))), np.finfo(float).tiny)
    residual = float(np.max(np.abs(system.matrix @ state - system.rhs))) / scale
    return Solution(state, report, residual)
