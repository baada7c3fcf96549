"""Physical, entropy-conservative, and entropy-stable two-point fluxes.

Vectorized numpy implementations; these are the reference versions used by
the numpy backend and by the property tests.  Direction 0 is x, 1 is y.
"""

from __future__ import annotations

import numpy as np

from .physics import GasModel, _require_admissible, lf_alpha, pressure

# Taylor branch of the logarithmic mean switches on when
# zeta = ((a-b)/(a+b))^2 drops below this (standard Ismail-Roe treatment).
LOG_MEAN_SWITCH = 1e-4


def log_mean(a, b):
    """Logarithmic mean (b - a) / (ln b - ln a), series branch near a == b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise ValueError("log_mean requires positive arguments")
    apb = a + b
    zeta = ((a - b) / apb) ** 2
    small = zeta < LOG_MEAN_SWITCH
    # series: ln(b/a) = 2 f (1 + f^2/3 + f^4/5 + ...), f = (b-a)/(b+a)
    series = 0.5 * apb / (1.0 + zeta * (1.0 / 3.0 + zeta * (1.0 / 5.0 + zeta / 7.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = (b - a) / np.log(b / a)
    out = np.where(small, series, exact)
    return out if out.shape else float(out)


def physical_flux(U: np.ndarray, gas: GasModel, direction: int = 0) -> np.ndarray:
    """Euler flux in the given direction: F for direction 0, G for 1."""
    _require_admissible(U, gas, "physical_flux")
    U = np.asarray(U)
    p = pressure(U, gas)
    un = U[..., 1 + direction] / U[..., 0]
    F = un[..., None] * U
    F[..., 1 + direction] += p
    F[..., -1] += p * un
    return F


def _split_prim(U: np.ndarray, gas: GasModel):
    rho = U[..., 0]
    vel = U[..., 1:-1] / rho[..., None]
    p = pressure(U, gas)
    return rho, vel, p


def ec_flux(UL: np.ndarray, UR: np.ndarray, gas: GasModel,
            direction: int = 0) -> np.ndarray:
    """Entropy-conservative two-point flux (kinetic-energy/entropy consistent).

    Satisfies (V_R - V_L)^T F^S = psi_R - psi_L with psi the normal momentum,
    is symmetric in its arguments, and reduces to the physical flux when the
    two states coincide.
    """
    _require_admissible(UL, gas, "ec_flux")
    _require_admissible(UR, gas, "ec_flux")
    UL, UR = np.broadcast_arrays(np.asarray(UL, float), np.asarray(UR, float))
    g = gas.gamma
    rhoL, velL, pL = _split_prim(UL, gas)
    rhoR, velR, pR = _split_prim(UR, gas)
    betaL = rhoL / (2.0 * pL)
    betaR = rhoR / (2.0 * pR)

    rho_ln = log_mean(rhoL, rhoR)
    beta_ln = log_mean(betaL, betaR)
    rho_a = 0.5 * (rhoL + rhoR)
    beta_a = 0.5 * (betaL + betaR)
    vel_a = 0.5 * (velL + velR)
    vel2_a = 0.5 * (velL ** 2 + velR ** 2)  # mean of squares, per component

    un = vel_a[..., direction]
    F = np.empty_like(UL)
    f1 = rho_ln * un
    F[..., 0] = f1
    ndim = UL.shape[-1] - 2
    for d in range(ndim):
        F[..., 1 + d] = vel_a[..., d] * f1
    F[..., 1 + direction] += rho_a / (2.0 * beta_a)
    etot = (1.0 / (2.0 * (g - 1.0) * beta_ln)
            - 0.5 * np.sum(vel2_a, axis=-1)) * f1
    for d in range(ndim):
        etot = etot + vel_a[..., d] * F[..., 1 + d]
    F[..., -1] = etot
    return F


def es_flux_lf(UL: np.ndarray, UR: np.ndarray, gas: GasModel,
               direction: int = 0) -> np.ndarray:
    """Lax-Friedrichs flux with the two-rarefaction dissipation coefficient."""
    UL, UR = np.broadcast_arrays(np.asarray(UL, float), np.asarray(UR, float))
    alpha = lf_alpha(UL, UR, gas, direction)
    FL = physical_flux(UL, gas, direction)
    FR = physical_flux(UR, gas, direction)
    return 0.5 * (FL + FR) - 0.5 * alpha[..., None] * (UR - UL)
