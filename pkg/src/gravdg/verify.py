"""Self-contained property suites: SBP operator identities, two-point flux
conditions, limiter contracts, and the semi-discrete entropy inequality.
The CLI's ``verify`` command is a thin wrapper around ``run_all``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fluxes, physics
from .backend import get_kernels
from .basis import make_basis
from .grid import Grid1D
from .limiter import LimiterParams, limit_cell, total_cell_entropy
from .physics import GasModel
from .solver import (BoundaryCondition, BoundarySpec1D, Discretization,
                     SchemeVariant)

MUTATIONS = ("ec-sign-flip",)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _ec_flux_fn(mutate: str | None):
    if mutate is None:
        return fluxes.ec_flux
    if mutate == "ec-sign-flip":
        def flipped(UL, UR, gas, direction=0):
            F = fluxes.ec_flux(UL, UR, gas, direction)
            F[..., -1] = -F[..., -1]
            return F
        return flipped
    raise ValueError(f"unknown mutation {mutate!r}; expected {MUTATIONS}")


def _random_states(rng: np.random.Generator, n: int, dim: int,
                   gas: GasModel) -> np.ndarray:
    rho = rng.uniform(0.1, 10.0, n)
    p = rng.uniform(0.1, 10.0, n)
    vel = rng.uniform(-3.0, 3.0, (n, dim))
    W = np.concatenate([rho[:, None], vel, p[:, None]], axis=1)
    return physics.prim_to_cons(W, gas)


def check_sbp(max_degree: int = 6, tol_sym: float = 1e-14,
              tol_cons: float = 1e-13) -> SuiteResult:
    worst = 0.0
    for k in range(1, max_degree + 1):
        b = make_basis(k)
        sym = np.max(np.abs(b.S + b.S.T - b.B))
        ones = np.max(np.abs(b.D @ np.ones(k + 1)))
        cols = np.max(np.abs(b.S.sum(axis=0) - b.tau))
        worst = max(worst, sym / tol_sym * 1e-14, ones, cols)
        if sym > tol_sym or ones > tol_cons or cols > tol_cons:
            return SuiteResult("sbp", False,
                               f"k={k}: sym={sym:.2e} ones={ones:.2e} "
                               f"cols={cols:.2e}")
    return SuiteResult("sbp", True, f"k=1..{max_degree}, worst {worst:.2e}")


def check_ec_condition(n_pairs: int = 100_000, tol: float = 1e-11,
                       gammas=(1.4, 5.0 / 3.0), seed: int = 7,
                       mutate: str | None = None) -> SuiteResult:
    """Two-point flux consistency with the entropy potential:
    (V_R - V_L)^T F^S = psi_R - psi_L."""
    ec = _ec_flux_fn(mutate)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for gamma in gammas:
        gas = GasModel(gamma=gamma)
        for dim in (1, 2):
            UL = _random_states(rng, n_pairs, dim, gas)
            UR = _random_states(rng, n_pairs, dim, gas)
            VL = physics.entropy_vars(UL, gas)
            VR = physics.entropy_vars(UR, gas)
            for direction in range(dim):
                F = ec(UL, UR, gas, direction)
                lhs = np.sum((VR - VL) * F, axis=1)
                rhs = (physics.potential_psi(UR, direction)
                       - physics.potential_psi(UL, direction))
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    ok = worst <= tol
    return SuiteResult("ec-flux-condition", ok,
                       f"max residual {worst:.2e} (tol {tol:.0e})")


def check_es_inequality(n_pairs: int = 100_000, tol: float = 1e-12,
                        gammas=(1.4, 5.0 / 3.0), seed: int = 11) -> SuiteResult:
    """Interface flux dissipativity: (V_R - V_L)^T F* <= psi_R - psi_L."""
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for gamma in gammas:
        gas = GasModel(gamma=gamma)
        for dim in (1, 2):
            UL = _random_states(rng, n_pairs, dim, gas)
            UR = _random_states(rng, n_pairs, dim, gas)
            VL = physics.entropy_vars(UL, gas)
            VR = physics.entropy_vars(UR, gas)
            for direction in range(dim):
                F = fluxes.es_flux_lf(UL, UR, gas, direction)
                gap = (np.sum((VR - VL) * F, axis=1)
                       - (physics.potential_psi(UR, direction)
                          - physics.potential_psi(UL, direction)))
                worst = max(worst, float(np.max(gap)))
    ok = worst <= tol
    return SuiteResult("es-flux-inequality", ok,
                       f"max excess {worst:.2e} (tol {tol:.0e})")


def check_limiter(n_cells: int = 10_000, seed: int = 13,
                  gamma: float = 1.4, kernels=None) -> SuiteResult:
    """Average invariance, idempotence, admissibility, entropy non-increase."""
    kernels = kernels if kernels is not None else get_kernels()
    rng = np.random.default_rng(seed)
    gas = GasModel(gamma=gamma)
    basis = make_basis(2)
    w = 0.5 * basis.weights
    params = LimiterParams(eps=1e-13)
    m = basis.n_nodes
    checked = 0
    for _ in range(n_cells):
        # random nodal states around an admissible average; many cells will
        # contain negative density or pressure nodes
        avgW = np.array([rng.uniform(0.2, 3.0), rng.uniform(-2.0, 2.0),
                         rng.uniform(0.2, 3.0)])
        avg = physics.prim_to_cons(avgW, gas)
        cell = avg[None, :] + rng.normal(0.0, rng.uniform(0.05, 3.0),
                                         (m, 3)) * np.abs(avg)[None, :]
        cell += avg[None, :] - np.einsum("q,qc->c", w, cell)[None, :]
        avg_now = np.einsum("q,qc->c", w, cell)
        if avg_now[0] < 1e-3 or physics.pressure(avg_now, gas) < 1e-3:
            continue
        checked += 1
        out = limit_cell(cell, w, params, gas, kernels)
        new_avg = np.einsum("q,qc->c", w, out)
        scale = np.maximum(np.abs(avg_now), 1.0)
        if np.max(np.abs(new_avg - avg_now) / scale) > 1e-13:
            return SuiteResult("limiter", False, "cell average changed")
        p = physics.pressure(out, gas)
        if np.any(out[:, 0] < 1e-13 * (1 - 1e-9)) or np.any(p < 1e-13 * (1 - 1e-9)):
            return SuiteResult("limiter", False, "output not admissible")
        again = limit_cell(out, w, params, gas, kernels)
        if np.max(np.abs(again - out)) > 1e-12 * np.max(np.abs(out)):
            return SuiteResult("limiter", False, "not idempotent")
        if np.all(physics.is_admissible(cell, gas)):
            before = total_cell_entropy(cell, basis.weights, gas)
            after = total_cell_entropy(out, basis.weights, gas)
            if after > before + 1e-12 * max(1.0, abs(before)):
                return SuiteResult("limiter", False, "entropy increased")
    return SuiteResult("limiter", True, f"{checked} randomized cells")


def check_entropy_contraction(n_fields: int = 20, tol: float = 1e-11,
                              gamma: float = 1.4, seed: int = 17,
                              kernels=None) -> SuiteResult:
    """Global semi-discrete entropy inequality sum w V . dU/dt <= 0 on
    randomized admissible periodic fields without gravity."""
    kernels = kernels if kernels is not None else get_kernels()
    rng = np.random.default_rng(seed)
    gas = GasModel(gamma=gamma)
    grid = Grid1D(0.0, 1.0, 16, make_basis(2))
    bc = BoundarySpec1D(BoundaryCondition.periodic(),
                        BoundaryCondition.periodic())
    disc = Discretization(grid, gas, SchemeVariant.WBESPP, bc,
                          kernels=kernels)
    wq = grid.quad_weights()
    worst = -np.inf
    for _ in range(n_fields):
        W = np.empty(grid.field_shape)
        W[..., 0] = rng.uniform(0.3, 3.0, grid.field_shape[:-1])
        W[..., 1] = rng.uniform(-2.0, 2.0, grid.field_shape[:-1])
        W[..., 2] = rng.uniform(0.3, 3.0, grid.field_shape[:-1])
        U = physics.prim_to_cons(W, gas)
        V = physics.entropy_vars(U, gas)
        rate = float(np.sum(wq[..., None] * V * disc.rhs(U)))
        worst = max(worst, rate)
    ok = worst <= tol
    return SuiteResult("entropy-contraction", ok,
                       f"max entropy production {worst:.2e} (tol {tol:.0e})")


def run_all(gamma: float = 1.4, fast: bool = False,
            mutate: str | None = None, kernels=None) -> list[SuiteResult]:
    # gamma outside (1, 5/3] triggers the range warning here, once
    GasModel(gamma=gamma)
    n = 10_000 if fast else 100_000
    cells = 1_000 if fast else 10_000
    gammas = (gamma,) if gamma != 1.4 else (1.4, 5.0 / 3.0)
    return [
        check_sbp(),
        check_ec_condition(n_pairs=n, gammas=gammas, mutate=mutate),
        check_es_inequality(n_pairs=n, gammas=gammas),
        check_limiter(n_cells=cells, gamma=gamma, kernels=kernels),
        check_entropy_contraction(gamma=gamma, kernels=kernels),
    ]
