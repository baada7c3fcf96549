"""Time-step selection and SSP time integrators.

The advective step follows Delta t = CFL dx / alpha (1D) or
CFL / (alpha_x/dx + alpha_y/dy) (2D) with CFL = 0.5 by default, and is
additionally capped by the positivity bound: the forward-Euler proof
requires Delta t <= min over directions of omega_0 dx / (4 alpha) in 1D
(omega_0 dx / (8 alpha_d) per direction in 2D) together with a bound
driven by the gravity source factors, and the ten-stage integrator used
here admits six forward-Euler steps' worth of that bound (its SSP
coefficient).  ``strict_pp`` drops the factor six and enforces the raw
forward-Euler bound.  The per-direction cap matters for strongly
anisotropic flows, where the combined 2D CFL rule alone would let one
direction exceed its positivity bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import physics
from .limiter import LimiterParams, limit_field
from .physics import AdmissibilityError
from .solver import Discretization

# evaluation times of the ten RHS calls, in units of dt
_SSPRK104_C = (0.0, 1 / 6, 1 / 3, 1 / 2, 2 / 3, 1 / 3, 1 / 2, 2 / 3, 5 / 6, 1.0)


@dataclass(frozen=True)
class StepControl:
    cfl: float = 0.5
    pp_safety: float = 0.99
    strict_pp: bool = False
    limit_per_stage: bool = True

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if not 0.0 < self.pp_safety <= 1.0:
            raise ValueError("pp_safety must lie in (0, 1]")


def _source_bound(theta: np.ndarray, beta: np.ndarray, gamma: float,
                  two_d: bool) -> float:
    """min over nodes of 1/(4|theta|) sqrt(1/(fac (gamma-1) beta))."""
    fac = 2.0 if two_d else 1.0
    mask = np.abs(theta) > 0.0
    if not np.any(mask):
        return np.inf
    vals = (np.sqrt(1.0 / (fac * (gamma - 1.0) * beta[mask]))
            / (4.0 * np.abs(theta[mask])))
    return float(vals.min())


def compute_dt(U: np.ndarray, disc: Discretization,
               control: StepControl = StepControl()) -> float:
    """Largest stable step for the current field, PP bound included."""
    grid = disc.grid
    gas = disc.gas
    w0 = grid.basis.weights[0]

    # SSP coefficient of the ten-stage integrator: the positivity bound of
    # a single forward-Euler step may be exceeded sixfold
    ssp = 1.0 if control.strict_pp else 6.0
    if grid.dim == 1:
        W = physics.cons_to_prim(U, gas)
        rho = W[..., 0]
        p = W[..., -1]
        if np.any(rho <= 0.0) or np.any(p <= 0.0):
            raise AdmissibilityError("compute_dt: inadmissible field")
        c = np.sqrt(gas.gamma * p / rho)
        beta = rho / (2.0 * p)
        alpha = float(np.max(np.abs(W[..., 1]) + c))
        dt = control.cfl * grid.dx / alpha
        fe = min(grid.dx * w0 / (4.0 * alpha),
                 grid.dx * _source_bound(disc.theta, beta, gas.gamma, False))
        dt = min(dt, control.pp_safety * ssp * fe)
    else:
        nc = U.shape[-1]
        ok, alpha_x, alpha_y, sbx, sby = disc.kernels.wave_source_bounds_2d(
            U.reshape(-1, nc), disc.theta.reshape(-1), disc.xi.reshape(-1),
            gas.gamma)
        if not ok:
            raise AdmissibilityError("compute_dt: inadmissible field")
        dt = control.cfl / (alpha_x / grid.dx + alpha_y / grid.dy)
        fe = min(grid.dx * w0 / (8.0 * alpha_x),
                 grid.dy * w0 / (8.0 * alpha_y),
                 grid.dx * sbx, grid.dy * sby)
        dt = min(dt, control.pp_safety * ssp * fe)
    if not np.isfinite(dt) or dt <= 0.0:
        raise ValueError(f"computed dt = {dt}; field is degenerate")
    return dt


def step_forward_euler(U: np.ndarray, dt: float, disc: Discretization,
                       limiter: LimiterParams, t: float = 0.0) -> np.ndarray:
    """One limited forward-Euler step."""
    out = U + dt * disc.rhs(U, t)
    limit_field(out, disc.grid, limiter, disc.gas, disc.kernels, t + dt)
    return out


def step_ssprk104(U: np.ndarray, dt: float, disc: Discretization,
                  limiter: LimiterParams, t: float = 0.0,
                  limit_per_stage: bool = True) -> np.ndarray:
    """One step of Ketcheson's low-storage ten-stage fourth-order SSP-RK.

    Every stage update is a convex combination of forward-Euler steps,
    so the limiter is applied after each one (or only once per step when
    ``limit_per_stage`` is off).
    """
    grid, gas, kernels = disc.grid, disc.gas, disc.kernels

    def maybe_limit(q, tq):
        if limit_per_stage:
            limit_field(q, grid, limiter, gas, kernels, tq)

    stage = 0

    def L(q, tq):
        nonlocal stage
        try:
            out = disc.rhs(q, tq)
        except AdmissibilityError as exc:
            raise AdmissibilityError(f"stage {stage}: {exc}") from exc
        stage += 1
        return out

    q1 = U.copy()
    for i in range(5):
        r = L(q1, t + _SSPRK104_C[i] * dt)
        r *= dt / 6.0
        q1 += r
        maybe_limit(q1, t + _SSPRK104_C[i] * dt)
    q2 = (1.0 / 25.0) * U + (9.0 / 25.0) * q1
    q1 = 15.0 * q2 - 5.0 * q1
    for i in range(5, 9):
        r = L(q1, t + _SSPRK104_C[i] * dt)
        r *= dt / 6.0
        q1 += r
        maybe_limit(q1, t + _SSPRK104_C[i] * dt)
    r = L(q1, t + _SSPRK104_C[9] * dt)
    r *= dt / 10.0
    q1 *= 0.6
    q1 += q2
    q1 += r
    out = q1
    # the final combination is itself a convex combination of Euler steps
    limit_field(out, grid, limiter, gas, kernels, t + dt)
    return out
