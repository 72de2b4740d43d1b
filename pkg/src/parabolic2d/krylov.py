"""Matrix-free stencil application and a BiCGStab(ell) iterative solver.

The solver follows the standard BiCGStab(ell) construction: each cycle runs
ell BiCG steps followed by an ell-dimensional minimal-residual polynomial
update.  One iteration means one full cycle; convergence inside the BiCG part
counts fractionally (with ell=2 a single BiCG step counts as 0.5), which is
the convention used by the iteration-count reports.

No preconditioning is applied unless a `precond` callable is supplied; it is
used as a right preconditioner, so the reported residual is the true one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cds import StencilMatrix, apply_full


class KrylovBreakdown(RuntimeError):
    """Raised when the recurrence degenerates twice (after one restart)."""


@dataclass
class LinearOperator:
    """A square operator given by its action; apply(x) must be linear."""

    n: int
    apply: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)


@dataclass
class KrylovReport:
    iterations: float
    final_relative_residual: float
    converged: bool


def matvec(A: StencilMatrix, x: np.ndarray) -> np.ndarray:
    """y = A x for one species block, zero contribution outside the interior."""
    x = np.asarray(x, dtype=float)
    g = A.grid
    if x.shape != (g.n_interior,):
        raise ValueError(f"operand shape {x.shape}, expected ({g.n_interior},)")
    w = np.zeros((g.My + 1, g.Mx + 1))
    w[1:-1, 1:-1] = x.reshape(g.ny, g.nx)
    return apply_full(A.coeffs, w).ravel()


def as_operator(A: StencilMatrix) -> LinearOperator:
    return LinearOperator(n=A.n, apply=lambda x: matvec(A, x))


def bicgstab_l(A, b: np.ndarray, x0: Optional[np.ndarray] = None,
               tol: float = 1e-10, ell: int = 2, maxit: int = 200,
               precond: Optional[Callable] = None):
    """Solve A x = b to ||b - A x|| <= tol ||b||; returns (x, KrylovReport).

    A is a LinearOperator (or any callable on vectors).  On a recurrence
    breakdown the iteration restarts once from the current iterate; a second
    breakdown raises KrylovBreakdown.  Exceeding maxit cycles returns a
    non-converged report.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    apply_A = A.apply if isinstance(A, LinearOperator) else A
    if precond is not None:
        inner_apply = lambda v: apply_A(precond(v))  # noqa: E731
    else:
        inner_apply = apply_A

    b = np.asarray(b, dtype=float)
    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        return np.zeros_like(b), KrylovReport(0.0, 0.0, True)

    z = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    r0 = b - inner_apply(z)
    rtilde = r0.copy()
    rho0, alpha, omega = 1.0, 0.0, 1.0
    rs = [r0] + [None] * ell
    us = [np.zeros_like(b)] + [None] * ell
    iters = 0.0
    restarted = False

    def finish(converged: bool):
        x = precond(z) if precond is not None else z
        res = np.linalg.norm(b - inner_apply(z)) / norm_b
        return x, KrylovReport(iters, res, converged)

    if np.linalg.norm(rs[0]) <= tol * norm_b:
        return finish(True)

    while iters < maxit:
        rho0 = -omega * rho0
        broke = False
        for j in range(ell):
            rho1 = np.dot(rs[j], rtilde)
            if rho0 == 0.0:
                broke = True
                break
            beta = alpha * rho1 / rho0
            rho0 = rho1
            for i in range(j + 1):
                us[i] = rs[i] - beta * us[i]
            us[j + 1] = inner_apply(us[j])
            gam = np.dot(us[j + 1], rtilde)
            if gam == 0.0:
                broke = True
                break
            alpha = rho0 / gam
            for i in range(j + 1):
                rs[i] = rs[i] - alpha * us[i + 1]
            rs[j + 1] = inner_apply(rs[j])
            z = z + alpha * us[0]
            iters += 1.0 / ell
            if np.linalg.norm(rs[0]) <= tol * norm_b:
                return finish(True)

        if not broke:
            # minimal-residual polynomial step (modified Gram-Schmidt)
            tau = np.zeros((ell + 1, ell + 1))
            sigma = np.zeros(ell + 1)
            gamma_p = np.zeros(ell + 1)
            for j in range(1, ell + 1):
                for i in range(1, j):
                    tau[i, j] = np.dot(rs[j], rs[i]) / sigma[i]
                    rs[j] = rs[j] - tau[i, j] * rs[i]
                sigma[j] = np.dot(rs[j], rs[j])
                if sigma[j] == 0.0:
                    broke = True
                    break
                gamma_p[j] = np.dot(rs[0], rs[j]) / sigma[j]
            if not broke:
                gamma = np.zeros(ell + 1)
                gamma_pp = np.zeros(ell + 1)
                gamma[ell] = gamma_p[ell]
                omega = gamma[ell]
                if omega == 0.0:
                    broke = True
            if not broke:
                for j in range(ell - 1, 0, -1):
                    gamma[j] = gamma_p[j] - np.dot(tau[j, j + 1:ell + 1],
                                                   gamma[j + 1:ell + 1])
                for j in range(1, ell):
                    gamma_pp[j] = gamma[j + 1] + np.dot(tau[j, j + 1:ell],
                                                        gamma[j + 2:ell + 1])
                z = z + gamma[1] * rs[0]
                rs[0] = rs[0] - gamma_p[ell] * rs[ell]
                us[0] = us[0] - gamma[ell] * us[ell]
                for j in range(1, ell):
                    us[0] = us[0] - gamma[j] * us[j]
                    z = z + gamma_pp[j] * rs[j]
                    rs[0] = rs[0] - gamma_p[j] * rs[j]
                if np.linalg.norm(rs[0]) <= tol * norm_b:
                    return finish(True)

        if broke:
            if restarted:
                raise KrylovBreakdown(
                    f"BiCGStab({ell}) breakdown persisted after restart "
                    f"(cycle {iters:.2f}, |rho|={abs(rho0):.3e})")
            restarted = True
            rs[0] = b - inner_apply(z)
            rtilde = rs[0].copy()
            us[0] = np.zeros_like(b)
            rho0, alpha, omega = 1.0, 0.0, 1.0

    return finish(False)
