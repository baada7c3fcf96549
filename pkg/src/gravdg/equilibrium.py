"""Gravity potentials, analytic hydrostatic equilibria, and the precomputed
well-balanced source factors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .grid import Grid1D, Grid2D
from .physics import GasModel


@dataclass(frozen=True)
class GravityPotential:
    """Time-independent potential phi with its gradient.

    ``phi(*coords)`` and ``grad(*coords)`` broadcast over coordinate arrays;
    ``grad`` returns one array per spatial dimension.
    """

    name: str
    phi: Callable[..., np.ndarray]
    grad: Callable[..., Sequence[np.ndarray]]


def linear_potential(g: float = 1.0) -> GravityPotential:
    """phi = g * (x [+ y])."""
    def phi(*coords):
        return g * sum(np.broadcast_arrays(*coords)) if len(coords) > 1 else g * coords[0]

    def grad(*coords):
        shape = np.broadcast(*coords).shape if len(coords) > 1 else np.shape(coords[0])
        return tuple(np.full(shape, g) for _ in coords)

    return GravityPotential("linear", phi, grad)


def vertical_potential(g: float = 9.8) -> GravityPotential:
    """phi = g * y on 2D domains."""
    def phi(x, y):
        return g * np.broadcast_arrays(x, y)[1].astype(float)

    def grad(x, y):
        bx, by = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return np.zeros_like(by), np.full_like(by, g)

    return GravityPotential("vertical", phi, grad)


def quadratic_radial_potential(scale: float = 0.5) -> GravityPotential:
    """phi = scale * (x^2 [+ y^2])."""
    def phi(*coords):
        return scale * sum(np.asarray(c, float) ** 2 for c in np.broadcast_arrays(*coords))

    def grad(*coords):
        return tuple(2.0 * scale * np.asarray(c, float)
                     for c in np.broadcast_arrays(*coords))

    return GravityPotential("quadratic_radial", phi, grad)


def radial_potential() -> GravityPotential:
    """phi = r = sqrt(x^2 + y^2).

    phi is non-smooth at the origin; the gradient there is taken as zero
    (the symmetric choice), which only matters for the pointwise source of
    the unbalanced variant when a mesh node lands exactly on r = 0.
    """
    def phi(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return np.hypot(x, y)

    def grad(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        r = np.hypot(x, y)
        safe = np.where(r == 0.0, 1.0, r)
        return x / safe, y / safe

    return GravityPotential("radial", phi, grad)


@dataclass(frozen=True)
class Equilibrium:
    """Analytic zero-velocity hydrostatic state: (rho, p) as functions of
    position, tied to the potential it balances."""

    name: str
    potential: GravityPotential
    prim: Callable[..., tuple[np.ndarray, np.ndarray]]


def isothermal_equilibrium(potential: GravityPotential, rho0: float = 1.0,
                           p0: float = 1.0, RT0: float | None = None,
                           R: float | None = None,
                           T0: float | None = None) -> Equilibrium:
    """rho = rho0 exp(-phi/(R T0)), p = p0 exp(-phi/(R T0)).

    Either pass RT0 directly or (R, T0); the latter must be consistent with
    p0 = rho0 R T0.
    """
    if RT0 is None:
        if R is None or T0 is None:
            RT0 = p0 / rho0
        else:
            RT0 = R * T0
            if not np.isclose(p0, rho0 * RT0, rtol=1e-12):
                raise ValueError("isothermal constants must satisfy p0 = rho0 R T0")
    if rho0 <= 0 or p0 <= 0 or RT0 <= 0:
        raise ValueError("isothermal equilibrium constants must be positive")

    def prim(*coords):
        f = np.exp(-potential.phi(*coords) / RT0)
        return rho0 * f, p0 * f

    return Equilibrium("isothermal", potential, prim)


def isentropic_equilibrium(potential: GravityPotential, gamma: float,
                           K0: float = 1.0, C: float | None = None,
                           rho0: float | None = None) -> Equilibrium:
    """rho = ((gamma-1)(C - phi)/(K0 gamma))^(1/(gamma-1)), p = K0 rho^gamma.

    If C is omitted it is fixed so that rho = rho0 where phi = 0.
    """
    if K0 <= 0:
        raise ValueError("K0 must be positive")
    if C is None:
        if rho0 is None or rho0 <= 0:
            raise ValueError("give either C or a positive rho0")
        C = K0 * gamma * rho0 ** (gamma - 1.0) / (gamma - 1.0)

    def prim(*coords):
        arg = (gamma - 1.0) * (C - potential.phi(*coords)) / (K0 * gamma)
        if np.any(arg <= 0.0):
            raise ValueError("isentropic equilibrium: C - phi must stay positive "
                             "on the domain")
        rho = arg ** (1.0 / (gamma - 1.0))
        return rho, K0 * rho ** gamma

    return Equilibrium("isentropic", potential, prim)


def inertia_gravity_background(gamma: float = 1.4, p0: float = 1e5,
                               T0: float = 300.0, N_freq: float = 0.01,
                               R: float = 287.058,
                               g: float = 9.8) -> Equilibrium:
    """Stratified channel background used by the atmospheric wave benchmark.

    Exner pressure: Pi = 1 + (gamma-1) g^2 / (gamma R T0 N^2) (exp(-N^2 y/g) - 1);
    potential temperature: T0 exp(N^2 y / g).  The N^2 in the Pi denominator is
    required for the hydrostatic balance p_y = -rho g to hold.
    """
    pot = vertical_potential(g)
    coef = (gamma - 1.0) * g * g / (gamma * R * T0 * N_freq ** 2)

    def prim(x, y):
        y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))[1]
        theta = T0 * np.exp(N_freq ** 2 * y / g)
        Pi = 1.0 + coef * (np.exp(-N_freq ** 2 * y / g) - 1.0)
        if np.any(Pi <= 0.0):
            raise ValueError("Exner pressure must stay positive on the domain")
        rho = p0 * Pi ** (1.0 / (gamma - 1.0)) / (R * theta)
        p = p0 * Pi ** (gamma / (gamma - 1.0))
        return rho, p

    return Equilibrium("inertia_gravity", pot, prim)


@dataclass(frozen=True)
class EquilibriumData:
    """Nodal equilibrium interpolant plus precomputed source factors.

    theta (and xi in 2D) hold the flux-differencing source factors built
    with the same kernel code path the solver uses for its volume term;
    s_x / s_y keep the undivided volume rows (rho * theta, rho * xi) so
    the solver can reproduce them bitwise.  ``strong`` marks factors built
    from nodal physical fluxes instead of entropy-conservative pairs (the
    non-entropy-stable variant).
    """

    equilibrium: Equilibrium
    U: np.ndarray
    rho: np.ndarray
    p: np.ndarray
    theta: np.ndarray
    xi: np.ndarray | None
    s_x: np.ndarray
    s_y: np.ndarray | None
    strong: bool


def nodal_equilibrium_state(grid: Grid1D | Grid2D, equilibrium: Equilibrium,
                            gas: GasModel) -> np.ndarray:
    """Sample the analytic equilibrium at every Gauss-Lobatto node."""
    if grid.dim == 1:
        rho, p = equilibrium.prim(grid.x)
    else:
        X, Y = grid.node_mesh()
        rho, p = equilibrium.prim(X, Y)
        rho, p = np.broadcast_arrays(rho, p)
        rho = np.broadcast_to(rho, grid.field_shape[:-1])
        p = np.broadcast_to(p, grid.field_shape[:-1])
    U = np.zeros(grid.field_shape)
    U[..., 0] = rho
    U[..., -1] = p / (gas.gamma - 1.0)
    return U


def build_equilibrium_data(grid: Grid1D | Grid2D, equilibrium: Equilibrium,
                           gas: GasModel, kernels,
                           strong: bool = False) -> EquilibriumData:
    """Precompute nodal equilibrium values and the source factors."""
    U = nodal_equilibrium_state(grid, equilibrium, gas)
    rho = U[..., 0].copy()
    p = (gas.gamma - 1.0) * U[..., -1]
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise ValueError("equilibrium is not admissible at every node")
    D = grid.basis.D
    Dmat = D if strong else 2.0 * D
    if grid.dim == 1:
        vol = kernels.volume_1d(U, Dmat, gas.gamma, not strong)
        s_x = vol[..., 1]
        s_y = None
        theta = s_x / rho
        xi = None
    else:
        gx, gy = equilibrium.potential.grad(*grid.node_mesh())
        if not (np.all(np.isfinite(gx)) and np.all(np.isfinite(gy))):
            raise ValueError("potential gradient is singular at a mesh node; "
                             "shift the mesh (e.g. keep r = 0 off the nodes)")
        vol_x = kernels.volume_2d(U, Dmat, gas.gamma, not strong, 0)
        vol_y = kernels.volume_2d(U, Dmat, gas.gamma, not strong, 1)
        s_x = vol_x[..., 1]
        s_y = vol_y[..., 2]
        theta = s_x / rho
        xi = s_y / rho
    return EquilibriumData(equilibrium=equilibrium, U=U, rho=rho, p=p,
                           theta=theta, xi=xi, s_x=s_x, s_y=s_y, strong=strong)
