"""Theta-weighted time stepping with an inexact Newton solver per step.

For the central scheme the fully discrete residual per species block is

    Ups = (W1 - W0)/tau + P W^th - R^th - Phi^th,

and for the compact scheme

    Ups = Q (W1 - W0)/tau + P W^th - Q R^th - Phi^th,

with Z^th = theta Z^1 + (1-theta) Z^0 for Z in {W, R, Phi}.  R is the
reaction (plus manufactured forcing, when present) on interior nodes; Phi
folds the Dirichlet data (and, for the compact scheme, the boundary values of
r - du/dt weighted by Q).  Each step solves Ups(W1) = 0 by Newton iteration
with BiCGStab(ell) inner solves; the initial guess on the new time layer is
the solution on the previous one.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import cds as cds_mod
from . import cfds as cfds_mod
from .cds import StencilMatrix, apply_full
from .grid import Grid2D, TimeGrid, validate_field
from .krylov import LinearOperator, bicgstab_l, matvec
from .model import ProblemSpec, check_compatibility

KINDS = ("cds", "cfds")


class SolverFailure(RuntimeError):
    """Newton or inner-solver failure; `step` holds the failing step index."""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step


@dataclass
class Scheme:
    """Assembled spatial operators for one problem/grid/scheme combination.

    kind "cds" carries stiffness matrices only (mass = identity); "cfds"
    carries (P, Q) pairs.  The unzeroed coefficient planes are kept for
    boundary folding.
    """

    kind: str
    P: List[StencilMatrix]
    p_full: List[np.ndarray]
    Q: Optional[List[StencilMatrix]] = None
    q_full: Optional[List[np.ndarray]] = None
    variant: str = "derived"


@dataclass
class SolverReport:
    """Per-step iteration counts and timings."""

    newton_iters: int
    krylov_cycles: List[float]
    wall_ms: float
    final_residual: float


@dataclass
class StepState:
    t: float
    W: np.ndarray
    reports: List[SolverReport] = field(default_factory=list)


def build_scheme(problem: ProblemSpec, grid: Grid2D, kind: str,
                 variant: str = "derived") -> Scheme:
    if kind not in KINDS:
        raise ValueError(f"unknown scheme kind {kind!r}")
    P, p_full, Q, q_full = [], [], [], []
    for l in range(problem.L):
        cds_mod.check_diffusion_positive(problem, l, grid)
        if kind == "cds":
            full = cds_mod.cds_full_stencil(problem, l, grid)
        else:
            full = cfds_mod.cfds_full_stencil_p(problem, l, grid, variant)
            qf = cfds_mod.cfds_full_stencil_q(problem, l, grid, variant)
            q_full.append(qf)
            Q.append(StencilMatrix(grid, cds_mod.zero_boundary_offsets(qf), l))
        p_full.append(full)
        P.append(StencilMatrix(grid, cds_mod.zero_boundary_offsets(full), l))
    if kind == "cds":
        return Scheme(kind=kind, P=P, p_full=p_full, variant=variant)
    return Scheme(kind=kind, P=P, p_full=p_full, Q=Q, q_full=q_full,
                  variant=variant)


def _interior_xy(grid: Grid2D):
    XX, YY = grid.interior_mesh()
    return XX.ravel(), YY.ravel()


def _interior_rhs(problem: ProblemSpec, grid: Grid2D, t: float,
                  W: np.ndarray) -> np.ndarray:
    """Reaction plus forcing at interior nodes, shape (L, n)."""
    xi, yi = _interior_xy(grid)
    R = np.asarray(problem.reaction(xi, yi, t, W), dtype=float)
    if problem.forcing is not None:
        R = R + np.stack([problem.forcing(l, xi, yi, t)
                          for l in range(problem.L)])
    return R


def _boundary_phi(scheme: Scheme, problem: ProblemSpec, grid: Grid2D,
                  tau: float, theta: float, t_n: float) -> np.ndarray:
    """Theta-averaged boundary contribution Phi^th, shape (L, n)."""
    L = problem.L
    t1 = t_n + tau
    rings0 = np.stack([cds_mod.boundary_values_full(problem, l, grid, t_n)
                       for l in range(L)])
    rings1 = np.stack([cds_mod.boundary_values_full(problem, l, grid, t1)
                       for l in range(L)])
    phi = np.zeros((L, grid.n_interior))
    if scheme.kind == "cds":
        for l in range(L):
            p0 = -apply_full(scheme.p_full[l], rings0[l]).ravel()
            p1 = -apply_full(scheme.p_full[l], rings1[l]).ravel()
            phi[l] = theta * p1 + (1.0 - theta) * p0
        return phi

    XX, YY = grid.full_mesh()
    rate = (rings1 - rings0) / tau
    for m, rings in ((0, rings0), (1, rings1)):
        t_m = t1 if m else t_n
        w = theta if m else 1.0 - theta
        rhs = np.asarray(problem.reaction(XX, YY, t_m, rings), dtype=float)
        for l in range(L):
            rl = rhs[l] - rate[l]
            if problem.forcing is not None:
                rl = rl + problem.forcing(l, XX, YY, t_m)
            rl[1:-1, 1:-1] = 0.0
            phi[l] += w * (-apply_full(scheme.p_full[l], rings[l])
                           + apply_full(scheme.q_full[l], rl)).ravel()
    return phi


def residual(W_new: np.ndarray, W_old: np.ndarray, scheme: Scheme,
             problem: ProblemSpec, grid: Grid2D, tau: float, theta: float,
             t_n: float) -> np.ndarray:
    """Nonlinear residual Ups(W_new) of the theta-scheme step from t_n."""
    t1 = t_n + tau
    R1 = _interior_rhs(problem, grid, t1, W_new)
    R0 = _interior_rhs(problem, grid, t_n, W_old)
    phi = _boundary_phi(scheme, problem, grid, tau, theta, t_n)
    ups = np.empty_like(W_new)
    for l in range(problem.L):
        wth = theta * W_new[l] + (1.0 - theta) * W_old[l]
        rth = theta * R1[l] + (1.0 - theta) * R0[l]
        if scheme.kind == "cds":
            ups[l] = (W_new[l] - W_old[l]) / tau + matvec(scheme.P[l], wth) \
                - rth - phi[l]
        else:
            ups[l] = matvec(scheme.Q[l], W_new[l] - W_old[l]) / tau \
                + matvec(scheme.P[l], wth) - matvec(scheme.Q[l], rth) - phi[l]
    return ups


def _apply_jacobian(scheme: Scheme, J: np.ndarray, tau: float, theta: float,
                    x: np.ndarray) -> np.ndarray:
    """Action of the Newton matrix on x (L, n) for reaction Jacobian J (L, L, n)."""
    Jx = np.einsum("lmn,mn->ln", J, x)
    out = np.empty_like(x)
    for l in range(x.shape[0]):
        if scheme.kind == "cds":
            out[l] = x[l] / tau + theta * matvec(scheme.P[l], x[l]) \
                - theta * Jx[l]
        else:
            out[l] = matvec(scheme.Q[l], x[l]) / tau \
                + theta * matvec(scheme.P[l], x[l]) \
                - theta * matvec(scheme.Q[l], Jx[l])
    return out


def newton_matrix_apply(scheme: Scheme, problem: ProblemSpec, grid: Grid2D,
                        tau: float, theta: float, W_lin: np.ndarray,
                        x: np.ndarray, t: float) -> np.ndarray:
    """Matrix-free application of the step Jacobian at iterate W_lin."""
    xi, yi = _interior_xy(grid)
    J = np.asarray(problem.reaction_jacobian(xi, yi, t, W_lin), dtype=float)
    return _apply_jacobian(scheme, J, tau, theta, x)


def _jacobian_diagonal(scheme: Scheme, J: np.ndarray, tau: float,
                       theta: float) -> np.ndarray:
    L, n = J.shape[0], J.shape[2]
    diag = np.empty((L, n))
    for l in range(L):
        p00 = scheme.P[l].coeffs[1, 1].ravel()
        if scheme.kind == "cds":
            diag[l] = 1.0 / tau + theta * p00 - theta * J[l, l]
        else:
            q00 = scheme.Q[l].coeffs[1, 1].ravel()
            diag[l] = q00 / tau + theta * p00 - theta * q00 * J[l, l]
    return diag


def advance(state: StepState, scheme: Scheme, problem: ProblemSpec,
            grid: Grid2D, tau: float, theta: float, *,
            newton_tol: float = 1e-11, max_newton: int = 25,
            krylov_tol: float = 1e-10, ell: int = 2, krylov_maxit: int = 200,
            jacobi_precondition: bool = False) -> StepState:
    """One theta-scheme step by inexact Newton iteration.

    Converged when ||delta||_inf drops below newton_tol * (1 + ||W||_inf) and
    the residual satisfies the same scaled bound, so the accepted layer always
    fulfils ||Ups(W)||_inf <= newton_tol * (1 + ||W||_inf).
    """
    t_start = time.perf_counter()
    L, n = state.W.shape
    t_n = state.t
    t1 = t_n + tau
    xi, yi = _interior_xy(grid)
    W_old = state.W
    W = W_old.copy()
    ups = residual(W, W_old, scheme, problem, grid, tau, theta, t_n)
    cycles: List[float] = []
    converged = False
    for _ in range(max_newton):
        J = np.asarray(problem.reaction_jacobian(xi, yi, t1, W), dtype=float)
        op = LinearOperator(
            L * n, lambda v: _apply_jacobian(scheme, J, tau, theta,
                                             v.reshape(L, n)).ravel())
        precond = None
        if jacobi_precondition:
            dinv = 1.0 / _jacobian_diagonal(scheme, J, tau, theta).ravel()
            precond = lambda v: dinv * v  # noqa: E731
        delta, krep = bicgstab_l(op, -ups.ravel(), tol=krylov_tol, ell=ell,
                                 maxit=krylov_maxit, precond=precond)
        cycles.append(krep.iterations)
        if not krep.converged:
            raise SolverFailure(
                f"inner solver stalled at t={t_n:.6g} "
                f"(relative residual {krep.final_relative_residual:.3e} "
                f"after {krep.iterations:.1f} cycles)")
        W = W + delta.reshape(L, n)
        scale = 1.0 + np.max(np.abs(W))
        ups = residual(W, W_old, scheme, problem, grid, tau, theta, t_n)
        if np.max(np.abs(delta)) <= newton_tol * scale \
                and np.max(np.abs(ups)) <= newton_tol * scale:
            converged = True
            break
    if not converged:
        raise SolverFailure(
            f"Newton did not converge in {max_newton} iterations at "
            f"t={t_n:.6g}")
    final_res = float(np.max(np.abs(ups)))
    report = SolverReport(newton_iters=len(cycles), krylov_cycles=cycles,
                          wall_ms=(time.perf_counter() - t_start) * 1e3,
                          final_residual=final_res)
    return StepState(t=t1, W=W, reports=state.reports + [report])


def initial_field(problem: ProblemSpec, grid: Grid2D) -> np.ndarray:
    xi, yi = _interior_xy(grid)
    return np.stack([np.broadcast_to(
        np.asarray(problem.initial(l, xi, yi), dtype=float), xi.shape)
        for l in range(problem.L)])


def integrate(problem: ProblemSpec, grid: Grid2D, time_grid: TimeGrid,
              scheme: Scheme, theta: float = 0.5,
              **solver_options):
    """March the nodal initial data through all N steps.

    Returns (final field, list of per-step SolverReports).  Step failures
    propagate as SolverFailure with the failing step index attached.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must be in [0, 1], got {theta}")
    check_compatibility(problem, grid)
    state = StepState(t=0.0, W=validate_field(initial_field(problem, grid),
                                              grid, problem.L))
    for n in range(time_grid.N):
        try:
            state = advance(state, scheme, problem, grid, time_grid.tau,
                            theta, **solver_options)
        except SolverFailure as exc:
            exc.step = n
            raise SolverFailure(f"step {n} failed: {exc}", step=n) from exc
    return state.W, state.reports


def average_counts(reports: List[SolverReport]):
    """(mean Newton iterations per step, mean Krylov cycles per Newton solve)."""
    if not reports:
        return float("nan"), float("nan")
    newton = [r.newton_iters for r in reports]
    cycles = [c for r in reports for c in r.krylov_cycles]
    return float(np.mean(newton)), float(np.mean(cycles)) if cycles else float("nan")
