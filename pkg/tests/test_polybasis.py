import math

import numpy as np
import pytest

from hdgflow import polybasis as pb


def tri_monomial_integral(a, b):
    """Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!."""
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


class TestQuadrature:
    def test_interval_weight_sum(self):
        for deg in range(0, 25):
            q = pb.quad_interval(deg)
            assert abs(q.weights.sum() - 1.0) < 1e-14
            assert (q.weights > 0).all()

    def test_interval_two_point_cubic(self):
        # 2 Gauss points integrate t^3 on [0,1] to 1/4
        q = pb.quad_interval(3)
        assert len(q.points) == 2
        assert abs(np.dot(q.weights, q.points ** 3) - 0.25) < 1e-15

    @pytest.mark.parametrize("deg", range(0, 22))
    def test_triangle_exactness(self, deg):
        q = pb.quad_triangle(deg)
        assert (q.weights > 0).all()
        assert abs(q.weights.sum() - 0.5) < 1e-13
        for a in range(deg + 1):
            for b in range(deg + 1 - a):
                val = np.dot(q.weights, q.points[:, 0] ** a * q.points[:, 1] ** b)
                assert abs(val - tri_monomial_integral(a, b)) < 1e-13

    def test_triangle_degree2_example(self):
        # int x^2 over the reference triangle = 1/12
        q = pb.quad_rule("triangle", 2)
        assert abs(np.dot(q.weights, q.points[:, 0] ** 2) - 1.0 / 12.0) < 1e-14

    def test_unknown_domain(self):
        with pytest.raises(ValueError):
            pb.quad_rule("square", 2)


class TestLegendre:
    def test_degree2_closed_form(self):
        # member of degree 2 at t mapped to [-1,1]: (3t^2-1)/2; here t=0.5
        vals = pb.legendre_values(3, np.array([0.75]))  # 2*0.75-1 = 0.5
        unnorm = vals[0, 2] / math.sqrt(5.0)
        assert abs(unnorm - (-0.125)) < 1e-14

    def test_orthonormal(self):
        k = 6
        q = pb.quad_interval(2 * k)
        v = pb.legendre_values(k, q.points)
        gram = (v * q.weights[:, None]).T @ v
        assert np.abs(gram - np.eye(k + 1)).max() < 1e-12

    def test_member0_constant_unit_integral(self):
        q = pb.quad_interval(4)
        v = pb.legendre_values(2, q.points)
        assert np.allclose(v[:, 0], 1.0)
        assert abs(np.dot(q.weights, v[:, 0] ** 2) - 1.0) < 1e-14

    def test_derivatives_match_fd(self):
        k = 5
        t = np.linspace(0.05, 0.95, 7)
        h = 1e-6
        d = pb.legendre_derivs(k, t)
        fd = (pb.legendre_values(k, t + h) - pb.legendre_values(k, t - h)) / (2 * h)
        assert np.abs(d - fd).max() < 1e-7


class TestDubiner:
    @pytest.mark.parametrize("k", [1, 3, 6])
    def test_gram_diagonal(self, k):
        q = pb.quad_triangle(2 * k)
        v = pb.dubiner_values(k, q.points)
        gram = (v * q.weights[:, None]).T @ v
        nb = (k + 1) * (k + 2) // 2
        assert v.shape == (len(q.weights), nb)
        assert np.abs(gram - 0.5 * np.eye(nb)).max() < 1e-12

    def test_member0_integrates_to_measure(self):
        q = pb.quad_triangle(3)
        v = pb.dubiner_values(2, q.points)
        assert np.allclose(v[:, 0], 1.0)
        assert abs(np.dot(q.weights, v[:, 0] ** 2) - 0.5) < 1e-14

    def test_ordering_by_total_degree(self):
        idx = pb.dubiner_index(3)
        degs = [i + j for i, j in idx]
        assert degs == sorted(degs)
        assert len(idx) == 10

    def test_gradients_match_fd(self):
        k = 4
        rng = np.random.default_rng(0)
        pts = rng.random((20, 2)) * 0.45 + 0.05
        pts[:, 1] *= 1.0 - pts[:, 0]
        _, g = pb.dubiner_values(k, pts, with_grads=True)
        h = 1e-6
        for d in range(2):
            dp = pts.copy()
            dm = pts.copy()
            dp[:, d] += h
            dm[:, d] -= h
            fd = (pb.dubiner_values(k, dp) - pb.dubiner_values(k, dm)) / (2 * h)
            assert np.abs(g[:, :, d] - fd).max() < 1e-6

    def test_eval_orthobasis_dispatch(self):
        v = pb.eval_orthobasis("DubinerTri", 2, np.array([[0.25, 0.25]]))
        assert v.shape == (1, 6)
        with pytest.raises(ValueError):
            pb.eval_orthobasis("MonomialTri", 2, np.array([[0.25, 0.25]]))


class TestBDM:
    def test_dimension_counts(self):
        # dim [P_k]^2 = (k+1)(k+2); edge dofs 3(k+1); interior (k+1)(k-1)
        b1 = pb.build_bdm_basis(1)
        assert b1.nb == 6 and b1.n_edge == 6 and b1.n_interior == 0
        b3 = pb.build_bdm_basis(3)
        assert b3.nb == 20 and b3.n_edge == 12 and b3.n_interior == 8

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_dual_kronecker(self, k):
        """Functionals applied to the dual basis give the identity.

        Recomputed with a higher-order quadrature than used in construction
        so this actually checks the Vandermonde solve."""
        basis = pb.build_bdm_basis(k)
        qe = pb.quad_interval(2 * k + 8)
        qv = pb.quad_triangle(2 * k + 8)
        edge_vals = np.stack([
            np.einsum("pqc,qj->pjc", basis.raw_values(pb.ref_edge_points(e, qe.points)), basis.coef)
            for e in range(3)
        ])
        vol_vals = np.einsum("pqc,qj->pjc", basis.raw_values(qv.points), basis.coef)
        rows = pb.bdm_functionals_applied(k, edge_vals, vol_vals, qe=qe, qv=qv)
        assert np.abs(rows - np.eye(basis.nb)).max() < 1e-10

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_interior_members_have_zero_normal_trace(self, k):
        basis = pb.build_bdm_basis(k)
        t = np.linspace(0.1, 0.9, 7)
        for e in range(3):
            vals = basis.values(pb.ref_edge_points(e, t))
            vn = vals @ pb.REF_EDGE_NORMALS[e]
            assert np.abs(vn[:, basis.n_edge:]).max() < 1e-9

    @pytest.mark.parametrize("k", [1, 2, 3, 5])
    def test_divergence_in_pkm1(self, k):
        """div of every member lies in P_{k-1}: orthogonal to Dubiner modes of
        degree k on the triangle."""
        basis = pb.build_bdm_basis(k)
        q = pb.quad_triangle(2 * k + 2)
        div = basis.divergence(q.points)
        dub = pb.dubiner_values(k, q.points)
        nb_lower = k * (k + 1) // 2
        proj = (dub * q.weights[:, None]).T @ div  # (nb_dub, nb_bdm)
        assert np.abs(proj[nb_lower:, :]).max() < 1e-10

    def test_condition_number_reported(self):
        for k in (2, 6):
            basis = pb.build_bdm_basis(k)
            assert np.isfinite(basis.cond) and basis.cond >= 1.0

    def test_degree_bounds(self):
        with pytest.raises(ValueError):
            pb.build_bdm_basis(0)
