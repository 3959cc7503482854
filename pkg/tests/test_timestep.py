import numpy as np
import pytest

from src.bench import CaseSpec, build_problem
from src.exceptions import InvalidCase, ShapeMismatch
from src.fem import assemble_mass
from src.linsolve import pinv_solve
from src.metrics import rmse
from src.timestep import (
    BackwardEulerStepper,
    TimeConfig,
    TransientOperator,
    integrate,
    run_transient,
    step_poisson,
    step_stokes,
)


def unsteady_case(method="FEM1", dt=0.01, tf=0.05, **extra):
    return CaseSpec.from_dict({"example": "P-Unsteady", "method": method, "dh": "1/4", "dt": dt, "tf": tf, **extra})


class TestTimeConfig:
    def test_defaults(self):
        time = TimeConfig()
        assert time.n_steps == 5000
        assert time.times()[-1] == pytest.approx(50.0)

    @pytest.mark.parametrize("dt, tf", [(0.0, 1.0), (-0.1, 1.0), (0.03, 0.1), (0.5, 0.2)])
    def test_invalid(self, dt, tf):
        with pytest.raises(InvalidCase):
            TimeConfig(dt, tf)


class TestSingleStep:
    def test_scalar_decay(self):
        u = step_poisson(np.eye(1), np.eye(1), np.zeros(1), np.ones(1), 0.01)
        assert u[0] == pytest.approx(1 / 1.01)

    def test_scalar_source(self):
        u = step_poisson(np.eye(1), np.eye(1), np.ones(1), np.zeros(1), 0.01)
        assert u[0] == pytest.approx(0.01 / 1.01)

    def test_zero_stays_zero(self, square_mesh):
        M = assemble_mass(square_mesh)
        K = np.eye(square_mesh.n_nodes)
        u = step_poisson(M, K, np.zeros(square_mesh.n_nodes), np.zeros(square_mesh.n_nodes), 0.1)
        assert np.allclose(u, 0.0)

    def test_algebraic_rows_solve_the_steady_equation(self):
        M = np.eye(2)
        K = np.array([[2.0, 0.0], [0.0, 1.0]])
        u = step_poisson(M, K, np.array([4.0, 0.0]), np.array([7.0, 1.0]), 0.5, time_rows=np.array([False, True]))
        assert u[0] == pytest.approx(2.0)
        assert u[1] == pytest.approx(1 / 1.5)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            TransientOperator(np.eye(2), np.eye(3), np.ones(3, dtype=bool))
        op = TransientOperator(np.eye(2), np.eye(2), np.ones(2, dtype=bool))
        with pytest.raises(ShapeMismatch):
            BackwardEulerStepper(op, 0.1).step(np.ones(3), np.ones(2))


class TestTransient:
    def test_single_step_run_matches_one_step(self):
        case = unsteady_case(tf=0.01)
        problem = build_problem(case)
        op = problem.transient_operator()
        expected = step_poisson(op.mass, op.matrix, problem.rhs(0.01), problem.initial_state(), 0.01, op.time_rows)
        result = run_transient(case, problem)
        assert result.n_steps == 1
        assert np.allclose(result.state, expected)

    def test_linear_in_time_solution_is_step_independent(self):
        coarse = run_transient(unsteady_case(dt=0.1, tf=2.0))
        fine = run_transient(unsteady_case(dt=0.01, tf=2.0))
        assert np.allclose(coarse.state, fine.state, atol=1e-9)
        assert coarse.final_time == fine.final_time == 2.0

    def test_trace_records_every_step(self):
        result = run_transient(unsteady_case(tf=0.05, trace=True))
        assert list(result.trace.columns) == ["step", "t", "rmse"]
        assert len(result.trace) == 5
        assert result.trace["t"].iloc[-1] == pytest.approx(0.05)
        assert result.max_residual < 1e-8

    def test_no_trace_by_default(self):
        assert run_transient(unsteady_case()).trace.empty

    def test_steady_case_rejected(self):
        case = CaseSpec.from_dict({"example": "P-Dir", "method": "FEM1", "dh": "1/4"})
        with pytest.raises(InvalidCase):
            run_transient(case)

    def test_kansa_unsteady_run(self):
        result = run_transient(unsteady_case(method="RBF-TPS", tf=0.03))
        assert result.n_steps == 3
        assert np.all(np.isfinite(result.state))

    def test_distance_to_steady_state_keeps_shrinking(self):
        problem = build_problem(CaseSpec.from_dict({"example": "P-Dir", "method": "FEM1", "dh": "1/4"}))
        steady, _ = pinv_solve(problem.system.matrix, problem.system.rhs)
        result = integrate(
            problem.transient_operator(),
            problem.rhs,
            np.zeros(problem.n_nodes),
            TimeConfig(0.02, 0.6),
            monitor=lambda state, t: rmse(state, steady),
        )
        distances = result.trace["rmse"].to_numpy()
        assert np.all(np.diff(distances[9:]) <= 1e-12)
        assert distances[-1] < distances[9]


class TestStokesStep:
    def test_steady_solution_is_a_fixed_point(self):
        case = CaseSpec.from_dict({"example": "S-Colliding", "method": "FEM2", "dh": "1/4"})
        problem = build_problem(case)
        system = problem.system
        steady, _ = pinv_solve(system.matrix, system.rhs)
        nxt = step_stokes(system, steady, 0.1, velocity_mass=assemble_mass(problem.mesh_v))
        assert np.allclose(nxt, steady, rtol=1e-8, atol=1e-8 * np.max(np.abs(steady)))

    def test_needs_a_mass_matrix(self):
        case = CaseSpec.from_dict({"example": "S-Colliding", "method": "FEM2", "dh": "1/4"})
        system = build_problem(case).system
        with pytest.raises(ShapeMismatch):
            step_stokes(system, np.zeros(len(system.rhs)), 0.1)
