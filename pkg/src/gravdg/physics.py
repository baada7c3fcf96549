"""State algebra for the ideal-gas Euler system with gravity.

Conserved states are plain float arrays whose last axis holds the
components: ``(rho, m, E)`` in 1D and ``(rho, m, n, E)`` in 2D.  All
functions broadcast over any number of leading axes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

ES_GAMMA_MAX = 5.0 / 3.0


class AdmissibilityError(ValueError):
    """Raised when an operation requires rho > 0 and p > 0 but got neither."""


@dataclass(frozen=True)
class GasModel:
    """Ideal-gas constants: adiabatic index and (optionally used) gas constant."""

    gamma: float = 1.4
    R: float = 287.058

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.gamma > ES_GAMMA_MAX:
            warnings.warn(
                f"gamma={self.gamma} exceeds 5/3; the entropy-stability bound for "
                "the two-rarefaction wave speed is only established for "
                "1 < gamma <= 5/3",
                stacklevel=2,
            )


def n_components(dim: int) -> int:
    return dim + 2


def pressure(U: np.ndarray, gas: GasModel) -> np.ndarray:
    """p = (gamma - 1) (E - |m|^2 / (2 rho))."""
    U = np.asarray(U)
    rho = U[..., 0]
    ke = 0.5 * np.sum(U[..., 1:-1] ** 2, axis=-1) / rho
    return (gas.gamma - 1.0) * (U[..., -1] - ke)


def cons_to_prim(U: np.ndarray, gas: GasModel) -> np.ndarray:
    """Return (rho, u[, v], p).  Does not reject inadmissible states; it only
    computes, so callers can decide what a negative rho/p means."""
    U = np.asarray(U)
    W = np.empty_like(U, dtype=float)
    rho = U[..., 0]
    W[..., 0] = rho
    W[..., 1:-1] = U[..., 1:-1] / rho[..., None]
    W[..., -1] = pressure(U, gas)
    return W


def prim_to_cons(W: np.ndarray, gas: GasModel) -> np.ndarray:
    W = np.asarray(W)
    U = np.empty_like(W, dtype=float)
    rho = W[..., 0]
    U[..., 0] = rho
    U[..., 1:-1] = rho[..., None] * W[..., 1:-1]
    ke = 0.5 * rho * np.sum(W[..., 1:-1] ** 2, axis=-1)
    U[..., -1] = W[..., -1] / (gas.gamma - 1.0) + ke
    return U


def is_admissible(U: np.ndarray, gas: GasModel) -> np.ndarray:
    """True where rho > 0 and p > 0 (the admissible set, strict inequalities)."""
    U = np.asarray(U)
    return (U[..., 0] > 0.0) & (pressure(U, gas) > 0.0)


def _require_admissible(U: np.ndarray, gas: GasModel, what: str) -> None:
    ok = is_admissible(U, gas)
    if not np.all(ok):
        bad = np.argwhere(~np.atleast_1d(ok))
        raise AdmissibilityError(f"{what} requires admissible states; "
                                 f"first violation at index {tuple(bad[0])}")


def specific_entropy(U: np.ndarray, gas: GasModel) -> np.ndarray:
    """s = ln(p rho^-gamma)."""
    U = np.asarray(U)
    return np.log(pressure(U, gas)) - gas.gamma * np.log(U[..., 0])


def entropy_function(U: np.ndarray, gas: GasModel) -> np.ndarray:
    """The convex entropy -rho s / (gamma - 1)."""
    return -np.asarray(U)[..., 0] * specific_entropy(U, gas) / (gas.gamma - 1.0)


def entropy_vars(U: np.ndarray, gas: GasModel) -> np.ndarray:
    """Entropy variables V = U'(U)^T; finite only on the admissible set."""
    _require_admissible(U, gas, "entropy_vars")
    U = np.asarray(U)
    p = pressure(U, gas)
    rho = U[..., 0]
    s = np.log(p) - gas.gamma * np.log(rho)
    V = np.empty_like(U, dtype=float)
    ke = 0.5 * np.sum(U[..., 1:-1] ** 2, axis=-1) / rho
    V[..., 0] = (gas.gamma - s) / (gas.gamma - 1.0) - ke / p
    V[..., 1:-1] = U[..., 1:-1] / p[..., None]
    V[..., -1] = -rho / p
    return V


def potential_psi(U: np.ndarray, direction: int = 0) -> np.ndarray:
    """Potential flux psi_i = rho u_i = momentum component i."""
    return np.asarray(U)[..., 1 + direction]


def sound_speed(U: np.ndarray, gas: GasModel) -> np.ndarray:
    _require_admissible(U, gas, "sound_speed")
    U = np.asarray(U)
    return np.sqrt(gas.gamma * pressure(U, gas) / U[..., 0])


def max_signal(U: np.ndarray, gas: GasModel, direction: int = 0) -> np.ndarray:
    """|u_d| + c in the given coordinate direction."""
    U = np.asarray(U)
    u = U[..., 1 + direction] / U[..., 0]
    return np.abs(u) + sound_speed(U, gas)


P_STAR_FLOOR = 1e-300


def rrf_wave_speed(UL: np.ndarray, UR: np.ndarray, gas: GasModel,
                   direction: int = 0) -> np.ndarray:
    """Two-rarefaction estimate of the maximal wave speed |lambda|.

    The pressure in the star region is approximated by the two-rarefaction
    formula; the returned speed max(|lambda_L|, |lambda_R|) then bounds the
    Riemann fan and, combined with |u|+c, yields an entropy-stable
    Lax-Friedrichs dissipation coefficient for 1 < gamma <= 5/3.
    """
    _require_admissible(UL, gas, "rrf_wave_speed")
    _require_admissible(UR, gas, "rrf_wave_speed")
    UL, UR = np.asarray(UL), np.asarray(UR)
    g = gas.gamma
    rhoL, rhoR = UL[..., 0], UR[..., 0]
    uL = UL[..., 1 + direction] / rhoL
    uR = UR[..., 1 + direction] / rhoR
    pL, pR = pressure(UL, gas), pressure(UR, gas)
    cL = np.sqrt(g * pL / rhoL)
    cR = np.sqrt(g * pR / rhoR)
    expo = (g - 1.0) / (2.0 * g)
    num = cL + cR - 0.5 * (g - 1.0) * (uR - uL)
    den = cL * pL ** -expo + cR * pR ** -expo
    pstar = np.where(num > 0.0, (np.maximum(num, 0.0) / den) ** (1.0 / expo),
                     0.0)
    pstar = np.maximum(pstar, P_STAR_FLOOR)
    gfac = (g + 1.0) / (2.0 * g)
    lamL = uL - cL * np.sqrt(1.0 + gfac * np.maximum((pstar - pL) / pL, 0.0))
    lamR = uR + cR * np.sqrt(1.0 + gfac * np.maximum((pstar - pR) / pR, 0.0))
    return np.maximum(np.abs(lamL), np.abs(lamR))


def lf_alpha(UL: np.ndarray, UR: np.ndarray, gas: GasModel,
             direction: int = 0) -> np.ndarray:
    """Dissipation coefficient max(|u_L|+c_L, |u_R|+c_R, alpha_RRF)."""
    return np.maximum(np.maximum(max_signal(UL, gas, direction),
                                 max_signal(UR, gas, direction)),
                      rrf_wave_speed(UL, UR, gas, direction))
