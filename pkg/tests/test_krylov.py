import numpy as np
import pytest

from parabolic2d import build_grid, make_example1
from parabolic2d.cds import StencilMatrix, assemble_cds
from parabolic2d.krylov import (KrylovBreakdown, LinearOperator, bicgstab_l,
                                matvec)


def identity_stencil(grid):
    c = np.zeros((3, 3, grid.ny, grid.nx))
    c[1, 1] = 1.0
    return StencilMatrix(grid=grid, coeffs=c)


def test_matvec_identity():
    g = build_grid(1, 1, 5, 4)
    A = identity_stencil(g)
    x = np.arange(g.n_interior, dtype=float)
    assert np.array_equal(matvec(A, x), x)


def test_matvec_annihilates_constants_in_full_interior():
    prob = make_example1()
    g = build_grid(prob.X, prob.Y, 8, 8)
    A = assemble_cds(prob, 0, g)
    y = matvec(A, np.ones(g.n_interior)).reshape(g.ny, g.nx)
    assert np.allclose(y[1:-1, 1:-1], 0.0, atol=1e-14 * np.max(np.abs(A.coeffs)))


def test_matvec_against_dense_oracle():
    rng = np.random.default_rng(41)
    g = build_grid(1, 1, 4, 4)  # 3x3 interior
    c = rng.standard_normal((3, 3, g.ny, g.nx))
    A = StencilMatrix(grid=g, coeffs=c)
    dense = A.to_dense()
    for _ in range(5):
        x = rng.standard_normal(g.n_interior)
        assert np.allclose(matvec(A, x), dense @ x, rtol=0, atol=1e-14)


def test_matvec_dimension_mismatch():
    g = build_grid(1, 1, 4, 4)
    with pytest.raises(ValueError):
        matvec(identity_stencil(g), np.zeros(5))


def test_operator_linearity():
    prob = make_example1()
    g = build_grid(prob.X, prob.Y, 6, 6)
    A = assemble_cds(prob, 2, g)
    op = LinearOperator(g.n_interior, lambda v: matvec(A, v))
    rng = np.random.default_rng(8)
    for _ in range(10):
        x, y = rng.standard_normal((2, g.n_interior))
        a, b = rng.standard_normal(2)
        lhs = op(a * x + b * y)
        rhs = a * op(x) + b * op(y)
        assert np.allclose(lhs, rhs, atol=1e-12 * np.max(np.abs(rhs)))


def test_bicgstab_identity_one_cycle():
    n = 30
    op = LinearOperator(n, lambda v: v)
    b = np.arange(1.0, n + 1)
    x, rep = bicgstab_l(op, b)
    assert rep.converged and rep.iterations <= 1.0
    assert np.allclose(x, b, rtol=1e-12)


def test_bicgstab_two_by_two():
    op = LinearOperator(2, lambda v: np.array([2.0, 3.0]) * v)
    x, rep = bicgstab_l(op, np.array([2.0, 3.0]))
    assert rep.converged
    assert np.allclose(x, [1.0, 1.0], rtol=1e-10)


def test_bicgstab_zero_rhs():
    op = LinearOperator(4, lambda v: 2.0 * v)
    x, rep = bicgstab_l(op, np.zeros(4))
    assert rep.converged and rep.iterations == 0.0
    assert np.array_equal(x, np.zeros(4))


@pytest.mark.parametrize("ell", [1, 2, 4])
def test_bicgstab_random_nonsymmetric(ell):
    rng = np.random.default_rng(13 + ell)
    n = 40
    A = np.eye(n) + 0.3 * rng.standard_normal((n, n)) / np.sqrt(n)
    b = rng.standard_normal(n)
    op = LinearOperator(n, lambda v: A @ v)
    x, rep = bicgstab_l(op, b, tol=1e-12, ell=ell)
    assert rep.converged
    assert np.linalg.norm(b - A @ x) <= 1e-10 * np.linalg.norm(b)
    assert np.allclose(x, np.linalg.solve(A, b), rtol=1e-8)


def test_bicgstab_spd_diagonal_few_cycles():
    rng = np.random.default_rng(19)
    n = 50
    d = rng.uniform(1.0, 3.0, size=n)
    op = LinearOperator(n, lambda v: d * v)
    b = rng.standard_normal(n)
    x, rep = bicgstab_l(op, b, tol=1e-12)
    assert rep.converged and rep.iterations <= n
    assert np.allclose(x, b / d, rtol=1e-9)


def test_bicgstab_report_contract():
    rng = np.random.default_rng(29)
    n = 25
    A = np.eye(n) + 0.2 * rng.standard_normal((n, n)) / np.sqrt(n)
    op = LinearOperator(n, lambda v: A @ v)
    tol = 1e-11
    _, rep = bicgstab_l(op, rng.standard_normal(n), tol=tol)
    assert rep.converged
    assert rep.final_relative_residual <= tol


def test_bicgstab_newton_matrix_cycle_count():
    # assembled manufactured-problem Newton operator at M=8: a handful of
    # cycles suffices for a 1e-10 relative residual
    from parabolic2d.stepper import build_scheme, newton_matrix_apply
    prob = make_example1()
    g = build_grid(prob.X, prob.Y, 8, 8)
    sch = build_scheme(prob, g, "cds")
    tau = prob.T / 8
    from parabolic2d.stepper import initial_field
    W = initial_field(prob, g)
    n = W.size
    op = LinearOperator(n, lambda v: newton_matrix_apply(
        sch, prob, g, tau, 0.5, W, v.reshape(W.shape), tau).ravel())
    rng = np.random.default_rng(3)
    b = rng.standard_normal(n)
    x, rep = bicgstab_l(op, b, tol=1e-10)
    assert rep.converged
    assert rep.iterations <= 4.0


def test_bicgstab_breakdown_raises_after_restart():
    op = LinearOperator(3, lambda v: 0.0 * v)
    with pytest.raises(KrylovBreakdown):
        bicgstab_l(op, np.ones(3))


def test_bicgstab_maxit_reports_nonconvergence():
    rng = np.random.default_rng(37)
    n = 60
    d = np.logspace(0, 8, n)
    op = LinearOperator(n, lambda v: d * v)
    x, rep = bicgstab_l(op, rng.standard_normal(n), tol=1e-14, maxit=1)
    assert not rep.converged
    assert rep.iterations <= 1.0


def test_bicgstab_parameter_validation():
    op = LinearOperator(2, lambda v: v)
    with pytest.raises(ValueError):
        bicgstab_l(op, np.ones(2), ell=0)
    with pytest.raises(ValueError):
        bicgstab_l(op, np.ones(2), tol=0.0)


def test_bicgstab_jacobi_preconditioning():
    rng = np.random.default_rng(43)
    n = 40
    d = rng.uniform(1, 100, size=n)
    A = np.diag(d) + 0.1 * rng.standard_normal((n, n))
    op = LinearOperator(n, lambda v: A @ v)
    b = rng.standard_normal(n)
    x, rep = bicgstab_l(op, b, tol=1e-11, precond=lambda v: v / d)
    assert rep.converged
    assert np.linalg.norm(b - A @ x) <= 1e-9 * np.linalg.norm(b)
