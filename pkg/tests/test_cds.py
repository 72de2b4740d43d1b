import numpy as np
import pytest

from parabolic2d import build_grid, make_example1
from parabolic2d.cds import (apply_full, assemble_cds, boundary_values_full,
                             cds_boundary_vector, cds_full_stencil)
from parabolic2d.model import ProblemSpec


def constant_problem(a=1.0, b=1.0, c=0.0, d=0.0, boundary=0.0):
    def f(v):
        return lambda l, x, y: np.full(np.shape(np.asarray(x, float)), v)
    def zero_reaction(x, y, t, u):
        return np.zeros_like(np.asarray(u, float))
    def zero_jac(x, y, t, u):
        u = np.asarray(u, float)
        return np.zeros((u.shape[0], u.shape[0]) + u.shape[1:])
    return ProblemSpec(
        L=1, diffusion_a=f(a), diffusion_b=f(b), advection_c=f(c),
        advection_d=f(d), reaction=zero_reaction, reaction_jacobian=zero_jac,
        boundary=lambda l, x, y, t: np.full(np.shape(np.asarray(x, float)), boundary),
        initial=lambda l, x, y: np.full(np.shape(np.asarray(x, float)), boundary),
        X=1.0, Y=1.0, T=1.0)


def test_discrete_laplacian_stencil():
    g = build_grid(1.0, 1.0, 5, 5)
    h = g.hx
    A = assemble_cds(constant_problem(), 0, g)
    c = A.coeffs[:, :, 2, 2]  # interior node away from the boundary
    assert c[1, 1] == pytest.approx(4 / h ** 2)
    assert c[0, 1] == pytest.approx(-1 / h ** 2)
    assert c[2, 1] == pytest.approx(-1 / h ** 2)
    assert c[1, 0] == pytest.approx(-1 / h ** 2)
    assert c[1, 2] == pytest.approx(-1 / h ** 2)


def test_advection_entry_value():
    # hx = 0.5, a = 1, c = 1: east coefficient = c/(2hx) - a/hx^2 = -3
    g = build_grid(2.0, 2.0, 4, 4)
    A = assemble_cds(constant_problem(a=1.0, c=1.0), 0, g)
    assert A.coeffs[2, 1, 1, 1] == pytest.approx(-3.0)


def test_corner_offsets_zero():
    prob = make_example1()
    g = build_grid(prob.X, prob.Y, 6, 6)
    A = assemble_cds(prob, 3, g)
    for k1 in (0, 2):
        for k2 in (0, 2):
            assert np.all(A.coeffs[k1, k2] == 0.0)


def test_row_sums_vanish_in_full_interior():
    prob = make_example1()
    g = build_grid(prob.X, prob.Y, 8, 8)
    A = assemble_cds(prob, 0, g)
    rs = A.row_sums()
    assert np.allclose(rs[1:-1, 1:-1], 0.0, atol=1e-14 * np.max(np.abs(A.coeffs)))


def test_rejects_nonpositive_diffusion():
    bad = constant_problem(a=0.0)
    with pytest.raises(ValueError, match="diffusion"):
        assemble_cds(bad, 0, build_grid(1, 1, 4, 4))


def test_boundary_vector_homogeneous_is_zero():
    prob = make_example1()
    g = build_grid(prob.X, prob.Y, 6, 6)
    assert np.all(cds_boundary_vector(prob, 0, g, 57.0) == 0.0)


def test_boundary_vector_single_interior_node():
    gval = 3.5
    prob = constant_problem(boundary=gval)
    g = build_grid(1.0, 1.0, 2, 2)
    phi = cds_boundary_vector(prob, 0, g, 0.0)
    assert phi.shape == (1,)
    assert phi[0] == pytest.approx(gval * (2 / g.hx ** 2 + 2 / g.hy ** 2))


def test_linear_boundary_data_exactness():
    # u = x solves -lap u = 0; P u - Phi must vanish on nodal values of x
    def f(v):
        return lambda l, x, y: np.full(np.shape(np.asarray(x, float)), v)
    prob = constant_problem()
    prob = ProblemSpec(
        L=1, diffusion_a=f(1.0), diffusion_b=f(1.0), advection_c=f(0.0),
        advection_d=f(0.0), reaction=prob.reaction,
        reaction_jacobian=prob.reaction_jacobian,
        boundary=lambda l, x, y, t: np.asarray(x, float).copy(),
        initial=lambda l, x, y: np.asarray(x, float).copy(),
        X=1.0, Y=1.0, T=1.0)
    g = build_grid(1.0, 1.0, 7, 5)
    A = assemble_cds(prob, 0, g)
    XX, _ = g.interior_mesh()
    u = XX.ravel()
    from parabolic2d.krylov import matvec
    res = matvec(A, u) - cds_boundary_vector(prob, 0, g, 0.0)
    assert np.max(np.abs(res)) < 1e-12


def test_consistency_second_order():
    # apply (P u - Phi) to the nodal sine product and compare with the
    # analytic -a lap u + c u_x + d u_y; the gap must shrink at O(h^2)
    prob = make_example1()
    X, Y = prob.X, prob.Y
    errs = []
    from parabolic2d.krylov import matvec
    for M in (8, 16, 32):
        g = build_grid(X, Y, M, M)
        XX, YY = g.interior_mesh()
        u = np.sin(np.pi * XX / X) * np.sin(np.pi * YY / Y)
        A = assemble_cds(prob, 0, g)
        lhs = matvec(A, u.ravel()) - cds_boundary_vector(prob, 0, g, 0.0)
        K = 1.8
        lap = -(np.pi ** 2) * (1 / X ** 2 + 1 / Y ** 2) * u
        ux = (np.pi / X) * np.cos(np.pi * XX / X) * np.sin(np.pi * YY / Y)
        uy = (np.pi / Y) * np.sin(np.pi * XX / X) * np.cos(np.pi * YY / Y)
        c = prob.advection_c(0, XX, YY)
        d = prob.advection_d(0, XX, YY)
        target = (-K * lap + c * ux + d * uy).ravel()
        errs.append(np.max(np.abs(lhs - target)))
    orders = [np.log2(errs[i - 1] / errs[i]) for i in (1, 2)]
    assert all(1.9 <= o <= 2.1 for o in orders), orders


def test_apply_full_matches_boundary_ring_definition():
    prob = make_example1()
    g = build_grid(prob.X, prob.Y, 5, 5)
    ring = boundary_values_full(prob, 2, g, 3.0)
    assert np.all(ring[1:-1, 1:-1] == 0.0)
    full = cds_full_stencil(prob, 2, g)
    phi = cds_boundary_vector(prob, 2, g, 3.0)
    assert np.allclose(phi, -apply_full(full, ring).ravel())
