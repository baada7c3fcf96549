"""Semi-discrete DG operator for the Euler equations with static gravity.

The right-hand side combines a per-cell volume term (entropy-conservative
flux differencing, or a plain strong-form divergence for the non-ES
variant), Lax-Friedrichs interface coupling, and a gravity source.  For the
balanced variants the source reuses the volume-term values precomputed on
the equilibrium interpolant, so an equilibrium input yields a bitwise-zero
tendency.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import physics
from .backend import get_kernels
from .equilibrium import (Equilibrium, EquilibriumData, GravityPotential,
                          build_equilibrium_data)
from .grid import Grid1D, Grid2D
from .physics import AdmissibilityError, GasModel


class SchemeVariant(enum.Enum):
    """The full scheme and its three ablations."""

    WBESPP = "wbespp"
    NON_WB = "non-wb"
    NON_ES = "non-es"
    NON_PP = "non-pp"

    @classmethod
    def from_name(cls, name: str) -> "SchemeVariant":
        key = name.strip().lower().replace("_", "-")
        for v in cls:
            if v.value == key:
                return v
        raise ValueError(f"unknown scheme variant {name!r}; "
                         f"expected one of {[v.value for v in cls]}")

    @property
    def flux_differencing(self) -> bool:
        """Entropy-conservative two-point volume term (off for non-ES)."""
        return self is not SchemeVariant.NON_ES

    @property
    def balanced_source(self) -> bool:
        """Source built from the equilibrium volume term (off for non-WB)."""
        return self is not SchemeVariant.NON_WB

    @property
    def limiting(self) -> bool:
        """Positivity limiter active (off for non-PP)."""
        return self is not SchemeVariant.NON_PP


class BCKind(enum.Enum):
    PERIODIC = "periodic"
    OUTFLOW = "outflow"
    REFLECTIVE = "reflective"
    EQUILIBRIUM = "equilibrium"
    EQUILIBRIUM_INFLOW = "equilibrium-inflow"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class BoundaryCondition:
    """One side of the domain.

    ``velocity`` is the imposed normal-velocity signal t -> u for
    equilibrium-inflow sides; ``prim`` is a callable giving primitive
    values (rho, u[, v], p) at face coordinates for dirichlet sides.
    """

    kind: BCKind
    velocity: Callable[[float], float] | None = None
    prim: Callable[..., tuple] | None = None

    @staticmethod
    def periodic() -> "BoundaryCondition":
        return BoundaryCondition(BCKind.PERIODIC)

    @staticmethod
    def outflow() -> "BoundaryCondition":
        return BoundaryCondition(BCKind.OUTFLOW)

    @staticmethod
    def reflective() -> "BoundaryCondition":
        return BoundaryCondition(BCKind.REFLECTIVE)

    @staticmethod
    def equilibrium() -> "BoundaryCondition":
        return BoundaryCondition(BCKind.EQUILIBRIUM)

    @staticmethod
    def equilibrium_inflow(velocity: Callable[[float], float]) -> "BoundaryCondition":
        return BoundaryCondition(BCKind.EQUILIBRIUM_INFLOW, velocity=velocity)

    @staticmethod
    def dirichlet(prim: Callable[..., tuple]) -> "BoundaryCondition":
        return BoundaryCondition(BCKind.DIRICHLET, prim=prim)


def _check_pair(a: BoundaryCondition, b: BoundaryCondition, axis: str) -> None:
    if (a.kind is BCKind.PERIODIC) != (b.kind is BCKind.PERIODIC):
        raise ValueError(f"periodic boundaries on axis {axis} must come in "
                         "matching pairs")


@dataclass(frozen=True)
class BoundarySpec1D:
    left: BoundaryCondition
    right: BoundaryCondition

    def __post_init__(self):
        _check_pair(self.left, self.right, "x")


@dataclass(frozen=True)
class BoundarySpec2D:
    x_left: BoundaryCondition
    x_right: BoundaryCondition
    y_bottom: BoundaryCondition
    y_top: BoundaryCondition

    def __post_init__(self):
        _check_pair(self.x_left, self.x_right, "x")
        _check_pair(self.y_bottom, self.y_top, "y")


def total_entropy(U: np.ndarray, grid: Grid1D | Grid2D, gas: GasModel) -> float:
    """Quadrature of the convex entropy -rho s / (gamma - 1) over the domain."""
    return float(np.sum(grid.quad_weights() * physics.entropy_function(U, gas)))


class Discretization:
    """Precomputed spatial operator; ``rhs(U, t)`` is a pure function of U."""

    def __init__(self, grid: Grid1D | Grid2D, gas: GasModel,
                 variant: SchemeVariant,
                 boundary: BoundarySpec1D | BoundarySpec2D,
                 equilibrium: Equilibrium | None = None,
                 potential: GravityPotential | None = None,
                 kernels=None):
        if grid.dim == 1 and not isinstance(boundary, BoundarySpec1D):
            raise ValueError("1D grid needs a BoundarySpec1D")
        if grid.dim == 2 and not isinstance(boundary, BoundarySpec2D):
            raise ValueError("2D grid needs a BoundarySpec2D")
        self.grid = grid
        self.gas = gas
        self.variant = variant
        self.boundary = boundary
        self.kernels = kernels if kernels is not None else get_kernels()
        self._ec = variant.flux_differencing
        self._Dvol = np.ascontiguousarray(
            (2.0 if self._ec else 1.0) * grid.basis.D)

        self.eqdata: EquilibriumData | None = None
        if equilibrium is not None:
            self.eqdata = build_equilibrium_data(
                grid, equilibrium, gas, self.kernels, strong=not self._ec)
            if potential is None:
                potential = equilibrium.potential
        self.potential = potential
        self._balanced = variant.balanced_source and self.eqdata is not None
        self._setup_source()

    # Source factors: theta (x) and xi (y) are the per-node quantities that
    # multiply rho/momentum inside the (2/dx)- and (2/dy)-scaled brackets.
    def _setup_source(self) -> None:
        grid = self.grid
        # placeholder passed to the fused 2D kernel in place of the
        # balanced-source arrays when the variant does not use them
        self._sx_arr = self._sy_arr = self._rho_e_arr = \
            np.empty((1, 1, 1, 1)) if grid.dim == 2 else None
        if self._balanced:
            eq = self.eqdata
            self._theta = eq.theta
            self._s_x = eq.s_x
            self._rho_e = eq.rho
            self._xi = eq.xi
            self._s_y = eq.s_y
            if grid.dim == 2:
                self._sx_arr = np.ascontiguousarray(eq.s_x)
                self._sy_arr = np.ascontiguousarray(eq.s_y)
                self._rho_e_arr = np.ascontiguousarray(eq.rho)
            return
        self._s_x = self._s_y = self._rho_e = None
        if self.potential is None:
            shape = grid.field_shape[:-1]
            self._theta = np.zeros(shape)
            self._xi = np.zeros(shape) if grid.dim == 2 else None
            return
        if grid.dim == 1:
            (gx,) = self.potential.grad(grid.x)
            self._theta = -0.5 * grid.dx * np.broadcast_to(
                gx, grid.field_shape[:-1]).astype(float)
            self._xi = None
        else:
            gx, gy = self.potential.grad(*grid.node_mesh())
            shape = grid.field_shape[:-1]
            self._theta = -0.5 * grid.dx * np.ascontiguousarray(
                np.broadcast_to(gx, shape), dtype=float)
            self._xi = -0.5 * grid.dy * np.ascontiguousarray(
                np.broadcast_to(gy, shape), dtype=float)

    @property
    def theta(self) -> np.ndarray:
        return self._theta

    @property
    def xi(self) -> np.ndarray | None:
        return self._xi

    def check_admissible(self, U: np.ndarray, t: float,
                         context: str = "rhs") -> None:
        flat = U.reshape(-1, U.shape[-1])
        bad = int(self.kernels.first_bad(flat, self.gas.gamma))
        if bad >= 0:
            idx = tuple(int(i) for i in np.unravel_index(bad, U.shape[:-1]))
            raise AdmissibilityError(
                f"{context}: inadmissible state at node index {idx}, t={t:.6g}")

    def rhs(self, U: np.ndarray, t: float = 0.0) -> np.ndarray:
        self.check_admissible(U, t)
        if self.grid.dim == 1:
            return self._rhs_1d(U, t)
        return self._rhs_2d(U, t)

    # -- 1D ---------------------------------------------------------------

    def _ghost_1d(self, bc: BoundaryCondition, interior: np.ndarray,
                  side: int, t: float) -> np.ndarray:
        if bc.kind is BCKind.OUTFLOW:
            return interior.copy()
        if bc.kind is BCKind.REFLECTIVE:
            g = interior.copy()
            g[1] = -g[1]
            return g
        if bc.kind in (BCKind.EQUILIBRIUM, BCKind.EQUILIBRIUM_INFLOW):
            if self.eqdata is None:
                raise ValueError("equilibrium boundary requires an equilibrium")
            trace = (self.eqdata.U[0, 0] if side == 0
                     else self.eqdata.U[-1, -1])
            if bc.kind is BCKind.EQUILIBRIUM:
                return trace.copy()
            rho = trace[0]
            u = float(bc.velocity(t))
            g = trace.copy()
            g[1] = rho * u
            g[2] = trace[2] + 0.5 * rho * u * u
            return g
        if bc.kind is BCKind.DIRICHLET:
            x = self.grid.a if side == 0 else self.grid.b
            w = np.array(bc.prim(x, t), dtype=float)
            return physics.prim_to_cons(w, self.gas)
        raise ValueError(f"unsupported boundary kind {bc.kind}")

    def _rhs_1d(self, U: np.ndarray, t: float) -> np.ndarray:
        k = self.kernels
        g = self.gas.gamma
        N, m, nc = U.shape
        w = self.grid.basis.weights
        vol = k.volume_1d(U, self._Dvol, g, self._ec)

        trL = np.ascontiguousarray(U[:, 0, :])
        trR = np.ascontiguousarray(U[:, -1, :])
        bc = self.boundary
        if bc.left.kind is BCKind.PERIODIC:
            gl, gr = trR[-1], trL[0]
        else:
            gl = self._ghost_1d(bc.left, trL[0], 0, t)
            gr = self._ghost_1d(bc.right, trR[-1], 1, t)
        minus = np.empty((N + 1, nc))
        plus = np.empty((N + 1, nc))
        minus[0] = gl
        minus[1:] = trR
        plus[:-1] = trL
        plus[-1] = gr
        Fstar = k.lf_flux(minus, plus, g, 0)
        FL = k.phys_flux(trL, g, 0)
        FR = k.phys_flux(trR, g, 0)

        rhs = -vol
        rhs[:, 0, :] += (Fstar[:-1] - FL) / w[0]
        rhs[:, -1, :] -= (Fstar[1:] - FR) / w[-1]

        rho = U[..., 0]
        if self._s_x is not None:
            # rho/rho_e is exactly 1 on the equilibrium interpolant, which
            # makes the momentum source cancel the volume term bitwise
            rhs[..., 1] += self._s_x * (rho / self._rho_e)
        else:
            rhs[..., 1] += rho * self._theta
        rhs[..., 2] += U[..., 1] * self._theta
        rhs *= 2.0 / self.grid.dx
        return rhs

    # -- 2D ---------------------------------------------------------------

    def _ghost_2d(self, bc: BoundaryCondition, interior: np.ndarray,
                  axis: int, side: int, t: float) -> np.ndarray:
        if bc.kind is BCKind.OUTFLOW:
            return interior.copy()
        if bc.kind is BCKind.REFLECTIVE:
            g = interior.copy()
            g[..., 1 + axis] = -g[..., 1 + axis]
            return g
        if bc.kind is BCKind.EQUILIBRIUM:
            if self.eqdata is None:
                raise ValueError("equilibrium boundary requires an equilibrium")
            Ue = self.eqdata.U
            if axis == 0:
                trace = Ue[0, :, 0, :, :] if side == 0 else Ue[-1, :, -1, :, :]
            else:
                trace = Ue[:, 0, :, 0, :] if side == 0 else Ue[:, -1, :, -1, :]
            return np.ascontiguousarray(trace)
        if bc.kind is BCKind.DIRICHLET:
            grid = self.grid
            if axis == 0:
                x = grid.a if side == 0 else grid.b
                y = grid.y
                vals = bc.prim(x, y, t)
            else:
                x = grid.x
                y = grid.c if side == 0 else grid.d
                vals = bc.prim(x, y, t)
            w = np.stack(np.broadcast_arrays(*vals), axis=-1).astype(float)
            return physics.prim_to_cons(w, self.gas)
        raise ValueError(f"unsupported boundary kind {bc.kind} in 2D")

    def _rhs_2d(self, U: np.ndarray, t: float) -> np.ndarray:
        k = self.kernels
        g = self.gas.gamma
        w = self.grid.basis.weights
        bc = self.boundary

        trL = U[:, :, 0, :, :]
        trR = U[:, :, -1, :, :]
        if bc.x_left.kind is BCKind.PERIODIC:
            gxl, gxr = trR[-1], trL[0]
        else:
            gxl = self._ghost_2d(bc.x_left, trL[0], 0, 0, t)
            gxr = self._ghost_2d(bc.x_right, trR[-1], 0, 1, t)
        trB = U[:, :, :, 0, :]
        trT = U[:, :, :, -1, :]
        if bc.y_bottom.kind is BCKind.PERIODIC:
            gyb, gyt = trT[:, -1], trB[:, 0]
        else:
            gyb = self._ghost_2d(bc.y_bottom, trB[:, 0], 1, 0, t)
            gyt = self._ghost_2d(bc.y_top, trT[:, -1], 1, 1, t)

        def full(ghost, like):
            return np.ascontiguousarray(np.broadcast_to(ghost, like.shape))

        return k.assemble_2d(U, full(gxl, trL[0]), full(gxr, trR[-1]),
                             full(gyb, trB[:, 0]), full(gyt, trT[:, -1]),
                             self._Dvol, g, self._ec,
                             float(w[0]), float(w[-1]),
                             self.grid.dx, self.grid.dy,
                             self._s_x is not None,
                             self._theta, self._xi,
                             self._sx_arr, self._sy_arr, self._rho_e_arr)
