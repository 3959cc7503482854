import numpy as np
import pytest

from src.exceptions import MissingPressureClosure, RbfError, SingularDerivative
from src.fem import DirichletData, NeumannData, PressurePin
from src.geometry import build_node_cloud
from src.linsolve import condition_number, pinv_solve
from src.rbf import (
    Coefficients,
    RbfKind,
    assemble_kansa_poisson,
    assemble_kansa_stokes,
    boundary_normals,
    evaluate_solution,
    interpolation_matrix,
    rbf_derivs,
    rbf_eval,
    rbf_gradient,
    rbf_laplacian,
    rbf_second,
)

KINDS = [RbfKind.mq(0.7), RbfKind.tps(4), RbfKind.tps(6)]


def p_dir(x, y, t=0.0):
    return np.sin(np.pi * x) * np.cos(np.pi * y / 2)


class TestKernels:
    def test_mq_at_origin(self):
        assert rbf_eval(RbfKind.mq(2.0), 0.0) == pytest.approx(2.0)

    def test_tps_values(self):
        assert rbf_eval(RbfKind.tps(2), 1.0) == pytest.approx(0.0)
        assert rbf_eval(RbfKind.tps(4), np.e) == pytest.approx(np.e ** 4)
        assert rbf_eval(RbfKind.tps(4), 0.0) == 0.0

    def test_mq_second_derivative_at_origin(self):
        c = 0.8
        dxx, dyy = rbf_second(RbfKind.mq(c), 0.0, 0.0)
        assert dxx == pytest.approx(1 / c)
        assert dyy == pytest.approx(1 / c)

    def test_invalid_kinds(self):
        with pytest.raises(RbfError):
            RbfKind.mq(0.0)
        with pytest.raises(RbfError):
            RbfKind.tps(3)

    def test_label(self):
        assert RbfKind.tps(4).label == "TPS(beta=4)"

    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.label)
    def test_gradient_matches_finite_differences(self, kind):
        dx, dy, h = 0.3, -0.2, 1e-6
        gx, gy = rbf_gradient(kind, dx, dy)
        phi = lambda a, b: rbf_eval(kind, np.hypot(a, b))
        assert gx == pytest.approx((phi(dx + h, dy) - phi(dx - h, dy)) / (2 * h), rel=1e-6)
        assert gy == pytest.approx((phi(dx, dy + h) - phi(dx, dy - h)) / (2 * h), rel=1e-6)

    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.label)
    def test_laplacian_matches_finite_differences(self, kind):
        dx, dy, h = 0.3, -0.2, 1e-4
        phi = lambda a, b: rbf_eval(kind, np.hypot(a, b))
        fd = (phi(dx + h, dy) + phi(dx - h, dy) + phi(dx, dy + h) + phi(dx, dy - h) - 4 * phi(dx, dy)) / h ** 2
        assert rbf_laplacian(kind, dx, dy) == pytest.approx(fd, rel=1e-4)

    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.label)
    def test_gradient_is_antisymmetric(self, kind):
        dx = np.array([0.1, -0.4, 0.25])
        dy = np.array([0.3, 0.05, -0.6])
        gx, gy = rbf_gradient(kind, dx, dy)
        mx, my = rbf_gradient(kind, -dx, -dy)
        assert np.allclose(gx, -mx)
        assert np.allclose(gy, -my)

    def test_tps_beta_two_laplacian_is_singular_at_origin(self):
        with pytest.raises(SingularDerivative):
            rbf_second(RbfKind.tps(2), np.array([0.0, 0.5]), np.array([0.0, 0.0]))

    def test_tps_beta_four_is_smooth_at_origin(self):
        assert rbf_laplacian(RbfKind.tps(4), np.array([0.0]), np.array([0.0]))[0] == 0.0

    def test_derivs_scalar(self):
        out = rbf_derivs(RbfKind.mq(1.0), 0.0, 0.0)
        assert out == pytest.approx((0.0, 0.0, 1.0, 1.0))


class TestInterpolation:
    def test_mq_interpolation_accuracy(self, square):
        cloud = build_node_cloud(square, 0.125)
        kind = RbfKind.mq(0.5)
        centers = cloud.points
        alpha, _ = pinv_solve(interpolation_matrix(centers, centers, kind), p_dir(centers[:, 0], centers[:, 1]))
        u = Coefficients(alpha, centers, kind)
        x = np.array([0.1875, 0.5625, 0.8125, 0.3125])
        y = np.array([0.0625, 0.4375, 0.6875, 0.9375])
        assert np.max(np.abs(u(x, y) - p_dir(x, y))) < 1e-2

    def test_mq_condition_grows_with_shape(self, square_cloud):
        centers = square_cloud.points
        cond = [condition_number(interpolation_matrix(centers, centers, RbfKind.mq(c))) for c in (0.5, 1.0, 2.0, 4.0)]
        assert all(a < b for a, b in zip(cond, cond[1:]))

    @pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.label)
    def test_interpolation_matrix_is_symmetric(self, square_cloud, kind):
        centers = square_cloud.points
        A = interpolation_matrix(centers, centers, kind)
        assert np.allclose(A, A.T, rtol=0.0, atol=1e-14)

    def test_evaluation_is_linear_in_the_coefficients(self, square_cloud):
        rng = np.random.default_rng(0)
        centers = square_cloud.points
        kind = RbfKind.mq(1.0)
        a1, a2 = rng.standard_normal((2, len(centers)))
        points = rng.uniform(0.0, 1.0, (20, 2))
        both = evaluate_solution(Coefficients(a1 + a2, centers, kind), points)
        apart = evaluate_solution(Coefficients(a1, centers, kind), points) + evaluate_solution(
            Coefficients(a2, centers, kind), points)
        assert np.allclose(both, apart, rtol=0.0, atol=1e-12)
        assert np.allclose(evaluate_solution(Coefficients(3.0 * a1, centers, kind), points),
                           3.0 * evaluate_solution(Coefficients(a1, centers, kind), points), rtol=0.0, atol=1e-12)

    def test_unit_coefficient_gives_the_kernel_at_its_center(self, square_cloud):
        centers = square_cloud.points
        alpha = np.zeros(len(centers))
        alpha[0] = 1.0
        value = evaluate_solution(Coefficients(alpha, centers, RbfKind.mq(2.0)), centers[:1])
        assert value[0] == pytest.approx(2.0)

    def test_offset_shifts_every_value(self, square_cloud):
        centers = square_cloud.points
        alpha = np.linspace(-1.0, 1.0, len(centers))
        kind = RbfKind.tps(4)
        plain = Coefficients(alpha, centers, kind)
        shifted = Coefficients(alpha, centers, kind, offset=2.5)
        assert np.allclose(evaluate_solution(shifted, centers), evaluate_solution(plain, centers) + 2.5)

    def test_coefficient_length_checked(self, square_cloud):
        with pytest.raises(RbfError):
            Coefficients(np.zeros(3), square_cloud.points, RbfKind.tps(4))


class TestKansaPoisson:
    def test_row_layout(self, square_cloud):
        system = assemble_kansa_poisson(
            square_cloud, RbfKind.tps(4), 1.0,
            lambda x, y, t: 1.25 * np.pi ** 2 * p_dir(x, y),
            DirichletData(lambda x, y, t: p_dir(x, y)),
        )
        assert system.matrix.shape == (25, 25)
        assert system.row_blocks["dirichlet"] == slice(0, 16)
        assert system.row_blocks["interior"] == slice(16, 25)
        assert system.time_rows.sum() == 9
        assert np.allclose(system.rhs[:16], p_dir(square_cloud.dirichlet[:, 0], square_cloud.dirichlet[:, 1]))

    def test_residual_small_when_well_conditioned(self, square_cloud):
        system = assemble_kansa_poisson(
            square_cloud, RbfKind.mq(0.5), 1.0,
            lambda x, y, t: 1.25 * np.pi ** 2 * p_dir(x, y),
            DirichletData(lambda x, y, t: p_dir(x, y)),
        )
        alpha, report = pinv_solve(system.matrix, system.rhs)
        if report.condition_number < 1e14:
            residual = np.max(np.abs(system.matrix @ alpha - system.rhs)) / np.max(np.abs(system.rhs))
            assert residual < 1e-8

    def test_neumann_rows_use_unit_normals(self, l_domain):
        cloud = build_node_cloud(l_domain, 0.25)
        normals = boundary_normals(cloud)
        assert normals.shape == (9, 2)
        assert np.allclose(np.linalg.norm(normals, axis=1), 1.0)
        system = assemble_kansa_poisson(
            cloud, RbfKind.tps(4), 1.0,
            lambda x, y, t: 0.0,
            DirichletData(lambda x, y, t: x + 2 * y),
            NeumannData(lambda x, y, t, nx, ny: nx + 2 * ny),
        )
        assert system.row_blocks["neumann"] == slice(7, 16)
        expected = normals[:, 0] + 2 * normals[:, 1]
        assert np.allclose(system.rhs[7:16], expected)

    def test_missing_neumann_data(self, l_domain):
        cloud = build_node_cloud(l_domain, 0.25)
        with pytest.raises(RbfError):
            assemble_kansa_poisson(cloud, RbfKind.tps(4), 1.0, lambda x, y, t: 0.0,
                                   DirichletData(lambda x, y, t: 0.0))

    def test_nonpositive_coefficient(self, square_cloud):
        with pytest.raises(RbfError):
            assemble_kansa_poisson(square_cloud, RbfKind.tps(4), -1.0, lambda x, y, t: 0.0,
                                   DirichletData(lambda x, y, t: 0.0))


class TestKansaStokes:
    def test_needs_pressure_closure(self, square_cloud):
        with pytest.raises(MissingPressureClosure):
            assemble_kansa_stokes(square_cloud, RbfKind.tps(4), lambda x, y, t: (0.0, 0.0),
                                  DirichletData(lambda x, y, t: (1.0, 0.0)))

    def test_pin_row(self, square_cloud):
        n = square_cloud.n_total
        system = assemble_kansa_stokes(
            square_cloud, RbfKind.tps(4), lambda x, y, t: (0.0, 0.0),
            DirichletData(lambda x, y, t: (1.0, 0.0)), pin=PressurePin((1.0, 1.0), 3.0),
        )
        assert system.matrix.shape == (3 * n, 3 * n)
        j = int(np.argmin(np.linalg.norm(square_cloud.points - [1.0, 1.0], axis=1)))
        row = system.matrix[2 * n + j]
        assert np.allclose(row[:2 * n], 0.0)
        assert system.rhs[2 * n + j] == 3.0
        others = np.delete(system.rhs[2 * n:], j)
        assert np.allclose(others, 0.0)
        assert system.time_rows.sum() == 2 * len(square_cloud.interior)

    def constant_flow(self, cloud, kind):
        return assemble_kansa_stokes(
            cloud, kind, lambda x, y, t: (0.0, 0.0),
            DirichletData(lambda x, y, t: (1.0, 0.0)), pin=PressurePin((1.0, 1.0), 0.0),
        )

    def test_pressure_reaches_only_momentum_and_pin_rows(self, square_cloud):
        n = square_cloud.n_total
        system = self.constant_flow(square_cloud, RbfKind.tps(4))
        touched = np.any(system.matrix[:, 2 * n:] != 0.0, axis=1)
        assert touched.sum() == 2 * len(square_cloud.interior) + 1
        # Fewer pressure rows than pressure unknowns: the square system is rank deficient.
        assert touched.sum() < n

    def test_constant_flow_at_moderate_shape(self, square_cloud):
        n = square_cloud.n_total
        system = self.constant_flow(square_cloud, RbfKind.mq(1.0))
        alpha, _ = pinv_solve(system.matrix, system.rhs)
        residual = np.max(np.abs(system.matrix @ alpha - system.rhs)) / np.max(np.abs(system.rhs))
        assert residual < 1e-3
        phi = interpolation_matrix(square_cloud.points, square_cloud.points, RbfKind.mq(1.0))
        boundary = square_cloud.row_blocks["dirichlet"]
        assert np.max(np.abs(phi[boundary] @ alpha[:n] - 1.0)) < 1e-3
        assert np.max(np.abs(phi[boundary] @ alpha[n:2 * n])) < 1e-3

    def test_natural_rows_on_l_shape(self, l_domain):
        cloud = build_node_cloud(l_domain, 0.25)
        n = cloud.n_total
        system = assemble_kansa_stokes(
            cloud, RbfKind.tps(4), lambda x, y, t: (0.0, 0.0),
            DirichletData(lambda x, y, t: (0.0, 0.0)),
            natural=lambda x, y, t, nx, ny: (nx, ny),
        )
        neumann = system.row_blocks["x.neumann"]
        assert neumann == slice(7, 16)
        normals = boundary_normals(cloud)
        assert np.allclose(system.rhs[neumann], normals[:, 0])
        assert np.allclose(system.rhs[n + 7:n + 16], normals[:, 1])
