"""Problem definitions for L-species weakly coupled semilinear parabolic systems.

A problem is

    du_l/dt - a_l u_xx - b_l u_yy + c_l u_x + d_l u_y = R_l(x,y,t,u) [+ xi_l],

on [0,X] x [0,Y] x (0,T] with Dirichlet boundary data and initial data.
All coefficient/data callables must broadcast over numpy coordinate arrays.

Two ready-made problems are provided:

* make_example1: a manufactured-solution verification problem: 10 identical
  equations whose forcing xi_l is chosen so that the exact solution is
  exp(-t/T) sin(pi x/X) sin(pi y/Y) for every species.
* make_example2: the air-pollution transport model: rotational wind, the
  10-species chemistry, constant initial concentrations and periodic-in-time
  boundary data compatible with them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import airchem
from .grid import Grid2D

DEFAULT_X = 500.0      # domain side, km
DEFAULT_Y = 500.0
DEFAULT_T = 1440.0     # final time, min
DEFAULT_K = 1.8        # diffusion, km^2/min
MU_STANDARD = 2.0 * math.pi / (60.0 * DEFAULT_T)
MU_FAST = 2.0 * math.pi / DEFAULT_X

# initial concentrations, mol/km^3, species order as in airchem.SPECIES
EXAMPLE2_INITIAL = (1e3, 1e3, 1e3, 5e3, 5e3, 1e2, 1e-2, 1e-2, 1e-3, 1e-11)


@dataclass(frozen=True)
class WindParams:
    """Rotational wind about the domain centre (xc, yc), angular rate mu."""

    mu: float
    xc: float
    yc: float


def rotational_wind(x, y, w: WindParams):
    """Velocity components (c, d) = (mu*(y - yc), mu*(xc - x))."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return w.mu * (y - w.yc), w.mu * (w.xc - x)


@dataclass(frozen=True)
class ProblemSpec:
    """An L-species problem: coefficients, reaction map, boundary/initial data.

    Callable conventions (l is the 0-based species index, arrays broadcast):
        diffusion_a(l, x, y), diffusion_b(l, x, y)   -> positive fields
        advection_c(l, x, y), advection_d(l, x, y)
        reaction(x, y, t, u)          u: (L, ...) -> (L, ...)
        reaction_jacobian(x, y, t, u) -> (L, L, ...)
        forcing(l, x, y, t)           optional, manufactured problems only
        boundary(l, x, y, t), initial(l, x, y)
    """

    L: int
    diffusion_a: Callable
    diffusion_b: Callable
    advection_c: Callable
    advection_d: Callable
    reaction: Callable
    reaction_jacobian: Callable
    boundary: Callable
    initial: Callable
    forcing: Optional[Callable] = None
    X: float = DEFAULT_X
    Y: float = DEFAULT_Y
    T: float = DEFAULT_T


def manufactured_solution(x, y, t, X: float = DEFAULT_X, Y: float = DEFAULT_Y,
                          T: float = DEFAULT_T):
    """exp(-t/T) sin(pi x/X) sin(pi y/Y); identical for every species."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.exp(-np.asarray(t, dtype=float) / T) * np.sin(np.pi * x / X) \
        * np.sin(np.pi * y / Y)


def manufactured_forcing(l: int, x, y, t, *, X: float = DEFAULT_X,
                         Y: float = DEFAULT_Y, T: float = DEFAULT_T,
                         K: float = DEFAULT_K, wind: WindParams,
                         rates: airchem.RateSet,
                         chemistry: str = "as-printed"):
    """Source xi_l that makes the manufactured solution solve the full system.

    Closed form of u_t - K lap(u) + c u_x + d u_y - R_l(u,...,u) at the
    exact solution: with s = sin(pi x/X) sin(pi y/Y) and e = exp(-t/T),

        u    = e s,                u_t = -u/T,
        lap u = -pi^2 (1/X^2 + 1/Y^2) u,
        u_x  = e (pi/X) cos(pi x/X) sin(pi y/Y),
        u_y  = e (pi/Y) sin(pi x/X) cos(pi y/Y).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    e = np.exp(-np.asarray(t, dtype=float) / T)
    sx = np.sin(np.pi * x / X)
    sy = np.sin(np.pi * y / Y)
    u = e * sx * sy
    u_t = -u / T
    lap = -(np.pi ** 2) * (1.0 / X ** 2 + 1.0 / Y ** 2) * u
    u_x = e * (np.pi / X) * np.cos(np.pi * x / X) * sy
    u_y = e * (np.pi / Y) * sx * np.cos(np.pi * y / Y)
    c, d = rotational_wind(x, y, wind)
    uvec = np.broadcast_to(u, (airchem.N_SPECIES,) + np.shape(u))
    R_l = airchem.reaction_rates(uvec, rates, variant=chemistry)[l]
    return u_t - K * lap + c * u_x + d * u_y - R_l


def _constant_field(value: float):
    def field(l, x, y):
        return np.full(np.shape(np.asarray(x, dtype=float)), value)
    return field


def make_example1(cos_theta: float = 1.0, chemistry: str = "as-printed") -> ProblemSpec:
    """Manufactured-solution problem: L=10, constant diffusion, rotational wind,
    full chemistry plus the compensating forcing, homogeneous Dirichlet data."""
    if cos_theta <= 0:
        raise ValueError(f"cos_theta must be positive, got {cos_theta}")
    X, Y, T, K = DEFAULT_X, DEFAULT_Y, DEFAULT_T, DEFAULT_K
    rates = airchem.rate_coefficients(cos_theta)
    wind = WindParams(mu=MU_STANDARD, xc=X / 2.0, yc=Y / 2.0)

    def advection_c(l, x, y):
        return rotational_wind(x, y, wind)[0]

    def advection_d(l, x, y):
        return rotational_wind(x, y, wind)[1]

    def reaction(x, y, t, u):
        return airchem.reaction_rates(u, rates, variant=chemistry)

    def reaction_jac(x, y, t, u):
        return airchem.reaction_jacobian(u, rates, variant=chemistry)

    def forcing(l, x, y, t):
        return manufactured_forcing(l, x, y, t, X=X, Y=Y, T=T, K=K,
                                    wind=wind, rates=rates, chemistry=chemistry)

    def boundary(l, x, y, t):
        return np.zeros(np.shape(np.asarray(x, dtype=float)))

    def initial(l, x, y):
        return manufactured_solution(x, y, 0.0, X, Y, T)

    return ProblemSpec(L=airchem.N_SPECIES,
                       diffusion_a=_constant_field(K), diffusion_b=_constant_field(K),
                       advection_c=advection_c, advection_d=advection_d,
                       reaction=reaction, reaction_jacobian=reaction_jac,
                       boundary=boundary, initial=initial, forcing=forcing,
                       X=X, Y=Y, T=T)


def make_example2(cos_theta: float = 1.0, mu: float = MU_STANDARD,
                  chemistry: str = "as-printed", C: float = 4.0) -> ProblemSpec:
    """Air-pollution transport model with the 10-species chemistry.

    Initial data are the constant concentrations EXAMPLE2_INITIAL; the
    boundary signal is const_l*(sin(t/C)+2) with const_l = u0_l/2, the unique
    amplitude for which boundary and initial data agree at t=0.
    """
    if cos_theta <= 0:
        raise ValueError(f"cos_theta must be positive, got {cos_theta}")
    X, Y, T, K = DEFAULT_X, DEFAULT_Y, DEFAULT_T, DEFAULT_K
    rates = airchem.rate_coefficients(cos_theta)
    wind = WindParams(mu=mu, xc=X / 2.0, yc=Y / 2.0)
    u0 = np.asarray(EXAMPLE2_INITIAL, dtype=float)
    consts = u0 / 2.0

    def advection_c(l, x, y):
        return rotational_wind(x, y, wind)[0]

    def advection_d(l, x, y):
        return rotational_wind(x, y, wind)[1]

    def reaction(x, y, t, u):
        return airchem.reaction_rates(u, rates, variant=chemistry)

    def reaction_jac(x, y, t, u):
        return airchem.reaction_jacobian(u, rates, variant=chemistry)

    def boundary(l, x, y, t):
        sig = airchem.boundary_signal(t, consts[l], C)
        return np.broadcast_to(sig, np.shape(np.asarray(x, dtype=float))).copy()

    def initial(l, x, y):
        return np.full(np.shape(np.asarray(x, dtype=float)), u0[l])

    return ProblemSpec(L=airchem.N_SPECIES,
                       diffusion_a=_constant_field(K), diffusion_b=_constant_field(K),
                       advection_c=advection_c, advection_d=advection_d,
                       reaction=reaction, reaction_jacobian=reaction_jac,
                       boundary=boundary, initial=initial, forcing=None,
                       X=X, Y=Y, T=T)


def check_compatibility(problem: ProblemSpec, grid: Grid2D, rtol: float = 1e-12) -> None:
    """Require boundary(l,.,.,0) == initial(l,.,.) on boundary nodes."""
    xs, ys = grid.x_nodes(), grid.y_nodes()
    edges = [
        (xs, np.zeros_like(xs)),
        (xs, np.full_like(xs, grid.Y)),
        (np.zeros_like(ys), ys),
        (np.full_like(ys, grid.X), ys),
    ]
    for l in range(problem.L):
        for xe, ye in edges:
            g = np.asarray(problem.boundary(l, xe, ye, 0.0), dtype=float)
            p = np.asarray(problem.initial(l, xe, ye), dtype=float)
            scale = np.maximum(np.abs(p), 1.0)
            if np.any(np.abs(g - p) > rtol * scale):
                raise ValueError(
                    f"species {l}: boundary data at t=0 incompatible with "
                    f"initial data (max deviation "
                    f"{np.max(np.abs(g - p) / scale):.3e})")
