"""Uniform rectangular meshes, lexicographic node indexing, nested-grid transfer.

Interior unknowns are stored per species as flat blocks of length
(Mx-1)*(My-1), ordered x-fastest (lexicographically): node (i, j) with
1 <= i <= Mx-1, 1 <= j <= My-1 sits at position (j-1)*(Mx-1) + (i-1).
Boundary values are never stored in field vectors; assembly folds them
into right-hand-side vectors.

A "field vector" throughout the package is a numpy array of shape
(L, (Mx-1)*(My-1)), one block row per species.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid2D:
    """Uniform mesh on [0, X] x [0, Y] with Mx, My subintervals."""

    X: float
    Y: float
    Mx: int
    My: int
    hx: float
    hy: float

    @property
    def nx(self) -> int:
        return self.Mx - 1

    @property
    def ny(self) -> int:
        return self.My - 1

    @property
    def n_interior(self) -> int:
        return self.nx * self.ny

    def x_nodes(self) -> np.ndarray:
        return np.arange(self.Mx + 1) * self.hx

    def y_nodes(self) -> np.ndarray:
        return np.arange(self.My + 1) * self.hy

    def interior_mesh(self):
        """Coordinate arrays of interior nodes, shape (My-1, Mx-1)."""
        return np.meshgrid(self.x_nodes()[1:-1], self.y_nodes()[1:-1])

    def full_mesh(self):
        """Coordinate arrays of all nodes, shape (My+1, Mx+1)."""
        return np.meshgrid(self.x_nodes(), self.y_nodes())


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time mesh on [0, T] with N steps of size tau = T/N."""

    T: float
    N: int
    tau: float

    def t(self, n: int) -> float:
        return n * self.tau


def build_grid(X: float, Y: float, Mx: int, My: int) -> Grid2D:
    """Build a uniform grid; requires positive extents and Mx, My >= 2."""
    if not (X > 0 and Y > 0):
        raise ValueError(f"domain extents must be positive, got X={X}, Y={Y}")
    if Mx < 2 or My < 2:
        raise ValueError(f"need Mx, My >= 2 for interior nodes, got {Mx}, {My}")
    return Grid2D(X=float(X), Y=float(Y), Mx=int(Mx), My=int(My),
                  hx=float(X) / Mx, hy=float(Y) / My)


def build_time_grid(T: float, N: int) -> TimeGrid:
    if not (T > 0 and N >= 1):
        raise ValueError(f"need T > 0 and N >= 1, got T={T}, N={N}")
    return TimeGrid(T=float(T), N=int(N), tau=float(T) / N)


def lex_index(i: int, j: int, Mx: int) -> int:
    """Flat index of interior node (i, j): k = (j-1)*(Mx-1) + (i-1)."""
    if not (1 <= i <= Mx - 1):
        raise ValueError(f"i={i} outside interior range 1..{Mx - 1}")
    if j < 1:
        raise ValueError(f"j={j} outside interior range (j >= 1)")
    return (j - 1) * (Mx - 1) + (i - 1)


def to_interior_grid(u: np.ndarray, grid: Grid2D) -> np.ndarray:
    """Reshape a field vector (L, n) to (L, My-1, Mx-1) without copying."""
    u = np.asarray(u)
    return u.reshape(u.shape[:-1] + (grid.ny, grid.nx))


def new_field(L: int, grid: Grid2D) -> np.ndarray:
    return np.zeros((L, grid.n_interior))


def validate_field(u: np.ndarray, grid: Grid2D, L: int | None = None) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[1] != grid.n_interior:
        raise ValueError(f"field shape {u.shape} does not match grid "
                         f"(expected (L, {grid.n_interior}))")
    if L is not None and u.shape[0] != L:
        raise ValueError(f"expected {L} species, got {u.shape[0]}")
    if not np.all(np.isfinite(u)):
        raise ValueError("field contains non-finite entries")
    return u


def refinement_factor(fine: Grid2D, coarse: Grid2D) -> int:
    """Integer factor by which `fine` refines `coarse`; rejects non-nested pairs.

    Nesting is checked structurally (subinterval counts and extents), never by
    comparing floating-point node coordinates.
    """
    if fine.X != coarse.X or fine.Y != coarse.Y:
        raise ValueError("grids cover different domains")
    if fine.Mx % coarse.Mx or fine.My % coarse.My:
        raise ValueError(f"grids not nested: {fine.Mx}x{fine.My} over "
                         f"{coarse.Mx}x{coarse.My}")
    r = fine.Mx // coarse.Mx
    if fine.My // coarse.My != r:
        raise ValueError("anisotropic refinement factors")
    return r


def restrict(fine: np.ndarray, fine_grid: Grid2D, coarse_grid: Grid2D) -> np.ndarray:
    """Injection onto coincident nodes: coarse (i, j) takes fine (r*i, r*j)."""
    r = refinement_factor(fine_grid, coarse_grid)
    fine = validate_field(fine, fine_grid)
    f2 = to_interior_grid(fine, fine_grid)
    c2 = f2[:, r - 1::r, r - 1::r]
    out = c2.reshape(fine.shape[0], coarse_grid.n_interior).copy()
    return out


def embed(coarse: np.ndarray, coarse_grid: Grid2D, fine_grid: Grid2D) -> np.ndarray:
    """Copy coarse values to coincident fine nodes, zero elsewhere.

    Left inverse of restrict: restrict(embed(u)) == u.
    """
    r = refinement_factor(fine_grid, coarse_grid)
    coarse = validate_field(coarse, coarse_grid)
    out = new_field(coarse.shape[0], fine_grid)
    f2 = to_interior_grid(out, fine_grid)
    f2[:, r - 1::r, r - 1::r] = to_interior_grid(coarse, coarse_grid)
    return out
