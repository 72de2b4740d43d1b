"""Second-order central-difference spatial assembly.

The 5-point operator realizes -a d2/dx2 - b d2/dy2 + c d/dx + d d/dy at the
interior nodes, with entries (offsets relative to the centre node)

    (+-1, 0): +-c/(2hx) - a/hx^2
    (0, +-1): +-d/(2hy) - b/hy^2
    (0,  0):  2a/hx^2 + 2b/hy^2

Stencil matrices store one coefficient plane per offset; coefficients that
would reference boundary nodes are zeroed in the matrix, and their
contribution is folded into a right-hand-side vector by the boundary-vector
routines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid2D
from .model import ProblemSpec

OFFSETS = [(k1, k2) for k1 in (-1, 0, 1) for k2 in (-1, 0, 1)]


@dataclass
class StencilMatrix:
    """Banded operator over interior nodes with a 3x3 stencil footprint.

    coeffs[k1+1, k2+1, j0, i0] multiplies the value at node
    (i0+1+k1, j0+1+k2); planes referencing boundary nodes are zero.
    """

    grid: Grid2D
    coeffs: np.ndarray  # (3, 3, My-1, Mx-1)
    species: int = 0

    @property
    def n(self) -> int:
        return self.grid.n_interior

    def row_sums(self) -> np.ndarray:
        return self.coeffs.sum(axis=(0, 1))

    def to_dense(self) -> np.ndarray:
        """Dense (n, n) matrix; test/oracle use only."""
        g = self.grid
        A = np.zeros((g.n_interior, g.n_interior))
        for k1, k2 in OFFSETS:
            plane = self.coeffs[k1 + 1, k2 + 1]
            for j0 in range(g.ny):
                for i0 in range(g.nx):
                    ii, jj = i0 + k1, j0 + k2
                    if 0 <= ii < g.nx and 0 <= jj < g.ny:
                        A[j0 * g.nx + i0, jj * g.nx + ii] = plane[j0, i0]
        return A


def apply_full(coeffs: np.ndarray, w_full: np.ndarray) -> np.ndarray:
    """Apply 3x3-offset coefficients to a full node array (My+1, Mx+1).

    Returns the action on interior nodes, shape (My-1, Mx-1).
    """
    ny, nx = coeffs.shape[2], coeffs.shape[3]
    out = np.zeros((ny, nx))
    for k1, k2 in OFFSETS:
        out += coeffs[k1 + 1, k2 + 1] * w_full[1 + k2:1 + k2 + ny, 1 + k1:1 + k1 + nx]
    return out


def zero_boundary_offsets(coeffs: np.ndarray) -> np.ndarray:
    """Zero the coefficient entries whose offset leaves the interior."""
    out = coeffs.copy()
    out[0, :, :, 0] = 0.0    # k1 = -1 at i = 1
    out[2, :, :, -1] = 0.0   # k1 = +1 at i = Mx-1
    out[:, 0, 0, :] = 0.0    # k2 = -1 at j = 1
    out[:, 2, -1, :] = 0.0   # k2 = +1 at j = My-1
    return out


def boundary_values_full(problem: ProblemSpec, l: int, grid: Grid2D, t: float) -> np.ndarray:
    """Full node array with Dirichlet data on the boundary ring, zero inside."""
    xs, ys = grid.x_nodes(), grid.y_nodes()
    w = np.zeros((grid.My + 1, grid.Mx + 1))
    w[0, :] = problem.boundary(l, xs, np.zeros_like(xs), t)
    w[-1, :] = problem.boundary(l, xs, np.full_like(xs, grid.Y), t)
    w[1:-1, 0] = problem.boundary(l, np.zeros_like(ys[1:-1]), ys[1:-1], t)
    w[1:-1, -1] = problem.boundary(l, np.full_like(ys[1:-1], grid.X), ys[1:-1], t)
    return w


def check_diffusion_positive(problem: ProblemSpec, l: int, grid: Grid2D) -> None:
    XX, YY = grid.full_mesh()
    for name, fn in (("a", problem.diffusion_a), ("b", problem.diffusion_b)):
        vals = np.broadcast_to(np.asarray(fn(l, XX, YY), dtype=float), XX.shape)
        if np.any(vals <= 0):
            j, i = np.unravel_index(np.argmin(vals), vals.shape)
            raise ValueError(
                f"species {l}: diffusion coefficient {name} nonpositive at node "
                f"(i={i}, j={j}), value {vals[j, i]:.3e}")


def _interior_coefficients(problem: ProblemSpec, l: int, grid: Grid2D):
    XX, YY = grid.interior_mesh()
    shape = XX.shape

    def ev(fn):
        return np.broadcast_to(np.asarray(fn(l, XX, YY), dtype=float), shape)

    return ev(problem.diffusion_a), ev(problem.diffusion_b), \
        ev(problem.advection_c), ev(problem.advection_d)


def cds_full_stencil(problem: ProblemSpec, l: int, grid: Grid2D) -> np.ndarray:
    """All 9 coefficient planes of the 5-point operator (corners zero)."""
    a, b, c, d = _interior_coefficients(problem, l, grid)
    hx, hy = grid.hx, grid.hy
    coeffs = np.zeros((3, 3, grid.ny, grid.nx))
    coeffs[2, 1] = c / (2 * hx) - a / hx ** 2
    coeffs[0, 1] = -c / (2 * hx) - a / hx ** 2
    coeffs[1, 2] = d / (2 * hy) - b / hy ** 2
    coeffs[1, 0] = -d / (2 * hy) - b / hy ** 2
    coeffs[1, 1] = 2 * a / hx ** 2 + 2 * b / hy ** 2
    return coeffs


def assemble_cds(problem: ProblemSpec, l: int, grid: Grid2D) -> StencilMatrix:
    """5-point matrix of -a d2x - b d2y + c dx + d dy, boundary columns folded out."""
    check_diffusion_positive(problem, l, grid)
    return StencilMatrix(grid=grid,
                         coeffs=zero_boundary_offsets(cds_full_stencil(problem, l, grid)),
                         species=l)


def cds_boundary_vector(problem: ProblemSpec, l: int, grid: Grid2D, t: float) -> np.ndarray:
    """Vector Phi with -(stencil coefficient)*(boundary value) contributions.

    (P u - Phi) applied to interior values then equals the stencil applied
    with the true Dirichlet data in place.
    """
    coeffs = cds_full_stencil(problem, l, grid)
    ring = boundary_values_full(problem, l, grid, t)
    return -apply_full(coeffs, ring).ravel()
