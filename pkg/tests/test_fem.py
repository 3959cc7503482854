import numpy as np
import pytest

from src.exceptions import FemError, OutsideReferenceElement, PinNodeNotFound, UnsupportedDegree
from src.fem import (
    DirichletData,
    FemField,
    NeumannData,
    PressurePin,
    ReferenceElement,
    assemble_mass,
    assemble_poisson,
    assemble_stiffness,
    assemble_stokes,
    divergence_blocks,
    edge_rule,
    quad_rule,
    shape_eval,
)
from src.geometry import NodeTag, TriMesh, bi_unit_square, build_structured_mesh, reorder_nodes
from src.linsolve import pinv_solve


def reference_triangle():
    return TriMesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]], (NodeTag.DIRICHLET,) * 3)


class TestQuadrature:
    @pytest.mark.parametrize("degree", [1, 2, 3, 4, 5])
    def test_weights_sum_to_reference_area(self, degree):
        assert quad_rule(degree).weights.sum() == pytest.approx(0.5)

    def test_degree_five_monomial(self):
        rule = quad_rule(5)
        xi, eta = rule.points[:, 0], rule.points[:, 1]
        assert np.sum(rule.weights * xi ** 2 * eta ** 3) == pytest.approx(1 / 420, rel=1e-12)

    def test_degree_four_monomial(self):
        rule = quad_rule(4)
        xi, eta = rule.points[:, 0], rule.points[:, 1]
        # int xi^a eta^b = a! b! / (a + b + 2)!
        assert np.sum(rule.weights * xi ** 4) == pytest.approx(24 / 720, rel=1e-9)

    def test_unsupported_degree(self):
        with pytest.raises(UnsupportedDegree):
            quad_rule(6)

    def test_edge_rule_integrates_quintics(self):
        s, w = edge_rule(3)
        assert w.sum() == pytest.approx(1.0)
        assert np.sum(w * s ** 5) == pytest.approx(1 / 6)


class TestReferenceElement:
    def test_linear_vertex_values(self):
        values, grads = shape_eval(ReferenceElement(1), (0.0, 0.0))
        assert np.allclose(values, [1.0, 0.0, 0.0])
        assert np.allclose(grads, [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])

    def test_linear_centroid(self):
        values, _ = shape_eval(ReferenceElement(1), (1 / 3, 1 / 3))
        assert np.allclose(values, 1 / 3)

    def test_quadratic_is_nodal(self):
        elem = ReferenceElement(2)
        assert np.allclose(elem.values(elem.nodes), np.eye(6))

    def test_quadratic_midpoint(self):
        values, _ = shape_eval(ReferenceElement(2), (0.5, 0.0))
        assert np.allclose(values, [0, 0, 0, 1, 0, 0])

    def test_outside_reference(self):
        with pytest.raises(OutsideReferenceElement):
            shape_eval(ReferenceElement(1), (0.8, 0.5))

    def test_unsupported_order(self):
        with pytest.raises(UnsupportedDegree):
            ReferenceElement(3)

    @pytest.mark.parametrize("order", [1, 2])
    def test_partition_of_unity(self, order):
        pts = np.array([[0.1, 0.2], [0.3, 0.3], [0.6, 0.1]])
        elem = ReferenceElement(order)
        assert np.allclose(elem.values(pts).sum(axis=1), 1.0)
        assert np.allclose(elem.gradients(pts).sum(axis=1), 0.0)

    def test_gradients_match_finite_differences(self):
        elem = ReferenceElement(2)
        p = np.array([0.21, 0.37])
        h = 1e-6
        grads = elem.gradients(p)[0]
        dx = (elem.values(p + [h, 0]) - elem.values(p - [h, 0]))[0] / (2 * h)
        dy = (elem.values(p + [0, h]) - elem.values(p - [0, h]))[0] / (2 * h)
        assert np.allclose(grads[:, 0], dx, atol=1e-8)
        assert np.allclose(grads[:, 1], dy, atol=1e-8)


class TestPoissonAssembly:
    def test_element_mass_matrix(self):
        expected = 0.5 / 12 * np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]])
        assert np.allclose(assemble_mass(reference_triangle()), expected)

    def test_element_stiffness_matrix(self):
        expected = np.array([[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]])
        assert np.allclose(assemble_stiffness(reference_triangle()), expected)

    @pytest.mark.parametrize("order", [1, 2])
    def test_global_matrices(self, square, order):
        mesh = build_structured_mesh(square, 0.25, order)
        K = assemble_stiffness(mesh)
        M = assemble_mass(mesh)
        assert np.allclose(K.sum(axis=1), 0.0, atol=1e-12)
        assert np.allclose(K, K.T)
        assert M.sum() == pytest.approx(1.0)

    def test_constant_solution(self, square_mesh):
        system = assemble_poisson(square_mesh, 1.0, lambda x, y, t: 0.0, DirichletData(lambda x, y, t: 5.0))
        u, _ = pinv_solve(system.matrix, system.rhs)
        assert np.allclose(u, 5.0)

    def test_linear_patch(self, square_mesh):
        exact = lambda x, y, t: x + y
        system = assemble_poisson(square_mesh, 1.0, lambda x, y, t: 0.0, DirichletData(exact))
        u, _ = pinv_solve(system.matrix, system.rhs)
        assert np.allclose(u, square_mesh.nodes.sum(axis=1), atol=1e-12)

    def test_quadratic_patch_on_p2(self, square):
        mesh = build_structured_mesh(square, 0.25, order=2)
        system = assemble_poisson(mesh, 1.0, lambda x, y, t: -4.0, DirichletData(lambda x, y, t: x ** 2 + y ** 2))
        u, _ = pinv_solve(system.matrix, system.rhs)
        assert np.allclose(u, (mesh.nodes ** 2).sum(axis=1), atol=1e-11)

    def test_neumann_patch_on_l_shape(self, l_domain):
        mesh = build_structured_mesh(l_domain, 0.25)
        exact = lambda x, y, t: x + 2 * y
        flux = NeumannData(lambda x, y, t, nx, ny: nx + 2 * ny)
        system = assemble_poisson(mesh, 2.0, lambda x, y, t: 0.0, DirichletData(exact), flux)
        u, _ = pinv_solve(system.matrix, system.rhs)
        assert np.allclose(u, mesh.nodes[:, 0] + 2 * mesh.nodes[:, 1], atol=1e-11)

    def test_dirichlet_rows_are_identity(self, square_mesh):
        system = assemble_poisson(square_mesh, 1.0, lambda x, y, t: 1.0, DirichletData(lambda x, y, t: 0.0))
        rows = square_mesh.indices(NodeTag.DIRICHLET)
        assert np.allclose(system.matrix[rows][:, rows], np.eye(len(rows)))
        assert np.allclose(system.rhs[rows], 0.0)

    @pytest.mark.parametrize("order", [1, 2])
    def test_element_order_does_not_matter(self, square, order):
        mesh = build_structured_mesh(square, 0.25, order)
        shuffled = TriMesh(mesh.nodes, mesh.triangles[np.random.default_rng(4).permutation(mesh.n_elements)],
                           mesh.node_tags, mesh.order, mesh.domain)
        source = lambda x, y, t: np.sin(np.pi * x) * y
        data = DirichletData(lambda x, y, t: x * y)
        a = assemble_poisson(mesh, 1.0, source, data)
        b = assemble_poisson(shuffled, 1.0, source, data)
        assert np.allclose(a.matrix, b.matrix, rtol=0.0, atol=1e-12)
        assert np.allclose(a.rhs, b.rhs, rtol=0.0, atol=1e-12)
        ua, _ = pinv_solve(a.matrix, a.rhs)
        ub, _ = pinv_solve(b.matrix, b.rhs)
        assert np.allclose(ua, ub, rtol=0.0, atol=1e-12)

    def test_node_numbering_permutes_the_solution(self, square_mesh):
        order = np.random.default_rng(5).permutation(square_mesh.n_nodes)
        renumbered = reorder_nodes(square_mesh, order)
        source = lambda x, y, t: 2.0 + x
        data = DirichletData(lambda x, y, t: x - y)
        a = assemble_poisson(square_mesh, 1.0, source, data)
        b = assemble_poisson(renumbered, 1.0, source, data)
        ua, _ = pinv_solve(a.matrix, a.rhs)
        ub, _ = pinv_solve(b.matrix, b.rhs)
        assert np.allclose(ub, ua[order], atol=1e-12)

    def test_nonpositive_coefficient(self, square_mesh):
        with pytest.raises(FemError):
            assemble_poisson(square_mesh, 0.0, lambda x, y, t: 0.0, DirichletData(lambda x, y, t: 0.0))

    def test_missing_dirichlet_data(self, square_mesh):
        with pytest.raises(FemError):
            assemble_poisson(square_mesh, 1.0, lambda x, y, t: 0.0, None)


class TestStokesAssembly:
    @pytest.fixture
    def meshes(self, square):
        mesh_v = build_structured_mesh(square, 0.25, order=2)
        return mesh_v, mesh_v.vertex_submesh()

    def _solve(self, mesh_v, mesh_p, f, velocity, pin):
        system = assemble_stokes(mesh_v, mesh_p, f, DirichletData(velocity), pin)
        state, _ = pinv_solve(system.matrix, system.rhs)
        blocks = system.blocks
        return state[blocks["u_x"]], state[blocks["u_y"]], state[blocks["p"]]

    def test_constant_velocity_zero_pressure(self, meshes):
        ux, uy, p = self._solve(
            *meshes, lambda x, y, t: (0.0, 0.0), lambda x, y, t: (1.0, 2.0), PressurePin((1.0, 1.0), 0.0)
        )
        assert np.allclose(ux, 1.0, atol=1e-10)
        assert np.allclose(uy, 2.0, atol=1e-10)
        assert np.allclose(p, 0.0, atol=1e-9)

    def test_linear_pressure_balances_source(self, meshes):
        mesh_v, mesh_p = meshes
        ux, uy, p = self._solve(
            mesh_v, mesh_p, lambda x, y, t: (1.0, 0.0), lambda x, y, t: (0.0, 0.0), PressurePin((1.0, 1.0), 1.0)
        )
        assert np.allclose(ux, 0.0, atol=1e-10)
        assert np.allclose(uy, 0.0, atol=1e-10)
        assert np.allclose(p, mesh_p.nodes[:, 0], atol=1e-9)

    def test_pressure_pin_row(self):
        mesh_v = build_structured_mesh(bi_unit_square(), 0.5, order=2)
        mesh_p = mesh_v.vertex_submesh()
        system = assemble_stokes(
            mesh_v, mesh_p,
            lambda x, y, t: (0.0, 0.0),
            DirichletData(lambda x, y, t: (20 * x * y ** 3, 5 * x ** 4 - 5 * y ** 4)),
            PressurePin((1.0, 1.0), 40.0),
        )
        state, _ = pinv_solve(system.matrix, system.rhs)
        j = int(np.argmin(np.linalg.norm(mesh_p.nodes - [1.0, 1.0], axis=1)))
        assert state[system.blocks["p"]][j] == pytest.approx(40.0, abs=1e-8)

    def test_pin_must_be_a_node(self, meshes):
        with pytest.raises(PinNodeNotFound):
            assemble_stokes(*meshes, lambda x, y, t: (0.0, 0.0), DirichletData(lambda x, y, t: (0.0, 0.0)),
                            PressurePin((0.3, 0.3), 0.0))

    def test_requires_taylor_hood_pair(self, square):
        mesh = build_structured_mesh(square, 0.25, order=1)
        with pytest.raises(FemError):
            assemble_stokes(mesh, mesh, lambda x, y, t: (0.0, 0.0), DirichletData(lambda x, y, t: (0.0, 0.0)))

    def test_divergence_of_linear_field(self, meshes):
        mesh_v, mesh_p = meshes
        lx, ly = divergence_blocks(mesh_v, mesh_p.n_nodes)
        # div (x, 0) = 1, so the continuity rows integrate the pressure basis.
        assert np.sum(lx.T @ mesh_v.nodes[:, 0]) == pytest.approx(1.0)
        assert np.allclose(ly.T @ np.ones(mesh_v.n_nodes), 0.0, atol=1e-12)


class TestFemField:
    def test_point_evaluation_reproduces_linear(self, square_mesh):
        values = 2 * square_mesh.nodes[:, 0] - square_mesh.nodes[:, 1]
        field = FemField(square_mesh, values)
        x = np.array([0.13, 0.5, 0.91])
        y = np.array([0.77, 0.5, 0.02])
        assert np.allclose(field(x, y), 2 * x - y)

    def test_outside_mesh(self, square_mesh):
        field = FemField(square_mesh, np.zeros(square_mesh.n_nodes))
        with pytest.raises(FemError):
            field(np.array([1.5]), np.array([0.5]))

    def test_length_checked(self, square_mesh):
        with pytest.raises(FemError):
            FemField(square_mesh, np.zeros(3))
