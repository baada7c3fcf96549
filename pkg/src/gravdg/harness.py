"""Benchmark-case catalog, run driver, error norms, and convergence tables."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import physics
from .backend import get_kernels
from .basis import lagrange_eval_matrix, make_basis
from .equilibrium import (Equilibrium, GravityPotential,
                          inertia_gravity_background, isentropic_equilibrium,
                          isothermal_equilibrium, linear_potential,
                          quadratic_radial_potential, radial_potential,
                          vertical_potential)
from .grid import Grid1D, Grid2D
from .limiter import LimiterParams
from .physics import AdmissibilityError, GasModel
from .solver import (BoundaryCondition, BoundarySpec1D, BoundarySpec2D,
                     Discretization, SchemeVariant, total_entropy)
from .timestep import StepControl, compute_dt, step_forward_euler, step_ssprk104


@dataclass(frozen=True)
class CaseSpec:
    """A complete benchmark configuration.

    ``init`` maps node coordinates (and the attached equilibrium, which may
    be None) to primitive arrays; ``exact``, when present, gives the exact
    primitive solution at time t and doubles as the error reference.
    """

    name: str
    dim: int
    bounds: tuple
    gamma: float
    t_final: float
    default_cells: tuple
    make_potential: Callable[[], GravityPotential] | None
    make_equilibrium: Callable[[float], Equilibrium] | None
    make_boundary: Callable[..., BoundarySpec1D | BoundarySpec2D]
    init: Callable
    exact: Callable | None = None
    reference: str | None = None          # "equilibrium" | "exact" | None
    slow: bool = False
    description: str = ""


@dataclass
class RunResult:
    case: CaseSpec
    variant: SchemeVariant
    grid: Grid1D | Grid2D
    disc: Discretization
    U: np.ndarray
    t: float
    steps: int
    entropy_log: list = field(default_factory=list)  # (step,t,dt,S,min_rho,min_p)
    snapshots: dict = field(default_factory=dict)
    aborted: str | None = None
    min_rho: float = math.inf
    min_p: float = math.inf
    wall_time: float = 0.0
    retries: int = 0

    @property
    def completed(self) -> bool:
        """Ran to the case's final time without aborting (a run truncated
        by ``max_steps`` is not 'completed')."""
        return bool(self.aborted is None
                    and self.t >= self.case.t_final * (1.0 - 1e-12))


# --------------------------------------------------------------------------
# case construction helpers

def _eq_init_1d(x, eq):
    rho, p = eq.prim(x)
    return rho, np.zeros_like(rho), p


def _eq_init_2d(x, y, eq):
    rho, p = eq.prim(x, y)
    rho, p = np.broadcast_arrays(rho, p)
    return rho, np.zeros_like(rho), np.zeros_like(rho), p


def _equilibrium_bc_1d(**_):
    return BoundarySpec1D(BoundaryCondition.equilibrium(),
                          BoundaryCondition.equilibrium())


def _equilibrium_bc_2d(**_):
    e = BoundaryCondition.equilibrium
    return BoundarySpec2D(e(), e(), e(), e())


def _sod_init(x, eq):
    rho = np.where(x < 0.0, 1.0, 0.125)
    p = np.where(x < 0.0, 1.0, 0.1)
    return rho, np.zeros_like(rho), p


def _drf1d_init(x, eq):
    rho, p = eq.prim(x)
    u = np.where(x < 0.0, -1.0, 1.0) * np.ones_like(rho)
    return 7.0 * np.ones_like(rho), u, 0.2 * np.ones_like(rho)


def _wb2d_perturb_init(x, y, eq):
    rho, u, v, p = _eq_init_2d(x, y, eq)
    bump = 0.001 * np.exp(-100.0 * ((x - 0.3) ** 2 + (y - 0.3) ** 2))
    return rho, u, v, p + np.broadcast_to(bump, rho.shape)


def _accuracy2d_exact(x, y, t):
    phase = x + y - 2.0 * t
    rho = 1.0 + 0.2 * np.sin(phase)
    one = np.ones(np.broadcast(x, y).shape)
    p = 20.0 - x - y + 2.0 * t + 0.2 * np.cos(phase)
    return rho * one, one, one.copy(), np.broadcast_to(p, one.shape) * 1.0


def _accuracy2d_init(x, y, eq):
    return _accuracy2d_exact(x, y, 0.0)


def _accuracy2d_bc(**_):
    d = BoundaryCondition.dirichlet(_accuracy2d_exact)
    return BoundarySpec2D(d, d, d, d)


def _drf2d_init(x, y, eq):
    rho, p = eq.prim(x, y)
    rho, p = np.broadcast_arrays(rho, p)
    u = np.where(np.broadcast_to(x, rho.shape) <= 0.0, -2.0, 2.0)
    return rho, u, np.zeros_like(rho), p


RT_R0 = 6.0
RT_ETA = 0.02
RT_DRHO = 0.1
RT_WAVENUMBER = 20


def _rt2d_init(x, y, eq):
    """Discontinuous double-layer atmosphere, sampled pointwise at nodes.

    The density jumps by exactly RT_DRHO at r0 (a colder, denser outer
    layer, each layer separately isothermal and hydrostatic); the pressure
    switches branch at the azimuthally perturbed radius
    r_i = r0 (1 + eta cos(k theta)), which seeds the interface inside the
    stability band [r0(1-eta), r0(1+eta)].  The outer layer decays on the
    short scale alpha, so far-field samples are floored at the positivity
    eps rather than left to underflow to zero.
    """
    X, Y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    r = np.hypot(X, Y)
    theta = np.arctan2(Y, X)
    alpha = 1.0 / (1.0 + RT_DRHO)
    r_i = RT_R0 * (1.0 + RT_ETA * np.cos(RT_WAVENUMBER * theta))
    # outer-layer pressure: continuous with exp(-r) at r0, and hydrostatic
    # for the colder layer temperature alpha (p' = -rho with rho = p/alpha)
    outer_p = np.exp(-r / alpha + RT_R0 * (1.0 - alpha) / alpha)
    rho = np.where(r < RT_R0, np.exp(-r), outer_p / alpha)
    p = np.where(r < r_i, np.exp(-r), outer_p)
    floor = 1e-13
    return (np.maximum(rho, floor), np.zeros_like(rho),
            np.zeros_like(rho), np.maximum(p, floor))


def _rt2d_far(x, y, t):
    # the far field is a static atmosphere; holding the initial hydrostatic
    # state in the ghosts keeps the thin outer layer from draining out
    return _rt2d_init(x, y, None)


def _rt2d_bc(**_):
    far = BoundaryCondition.dirichlet(_rt2d_far)
    return BoundarySpec2D(BoundaryCondition.reflective(), far,
                          BoundaryCondition.reflective(), far)


IGW_P0 = 1e5
IGW_T0 = 300.0
IGW_N = 0.01
IGW_R = 287.058
IGW_G = 9.8
IGW_THETA_C = 0.01
IGW_H_C = 10000.0
IGW_X_C = 100000.0
IGW_A_C = 5000.0
IGW_U0 = 20.0


def _igw_init(x, y, eq):
    X, Y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    rho_e, p_e = eq.prim(X, Y)
    theta_e = IGW_T0 * np.exp(IGW_N ** 2 * Y / IGW_G)
    dtheta = (IGW_THETA_C * np.sin(np.pi * Y / IGW_H_C)
              / (1.0 + ((X - IGW_X_C) / IGW_A_C) ** 2))
    # rho^e = p0 Pi^{1/(g-1)} / (R theta_e); perturbing theta rescales rho
    rho = rho_e * theta_e / (theta_e + dtheta)
    u = np.full_like(rho, IGW_U0)
    return rho, u, np.zeros_like(rho), p_e


def _igw_bc(**_):
    return BoundarySpec2D(BoundaryCondition.periodic(),
                          BoundaryCondition.periodic(),
                          BoundaryCondition.reflective(),
                          BoundaryCondition.reflective())


def _wb1d_perturb_bc(**_):
    signal = lambda t: 1e-6 * math.sin(4.0 * math.pi * t)  # noqa: E731
    return BoundarySpec1D(BoundaryCondition.equilibrium_inflow(signal),
                          BoundaryCondition.equilibrium())


def potential_temperature(W: np.ndarray, gas: GasModel,
                          p0: float = IGW_P0, R: float = IGW_R) -> np.ndarray:
    """theta = T (p0/p)^((gamma-1)/gamma) from primitive values."""
    rho = W[..., 0]
    p = W[..., -1]
    T = p / (R * rho)
    return T * (p0 / p) ** ((gas.gamma - 1.0) / gas.gamma)


CASES: dict[str, CaseSpec] = {}


def _register(spec: CaseSpec) -> CaseSpec:
    CASES[spec.name] = spec
    return spec


_register(CaseSpec(
    name="eqbm1", dim=1, bounds=(0.0, 2.0), gamma=5.0 / 3.0, t_final=4.0,
    default_cells=(100,),
    make_potential=lambda: linear_potential(1.0),
    make_equilibrium=lambda gamma: isothermal_equilibrium(
        linear_potential(1.0), rho0=1.0, p0=1.0, RT0=1.0),
    make_boundary=_equilibrium_bc_1d, init=_eq_init_1d,
    reference="equilibrium",
    description="1D isothermal column held at rest"))

_register(CaseSpec(
    name="eqbm2", dim=1, bounds=(0.0, 2.0), gamma=5.0 / 3.0, t_final=4.0,
    default_cells=(100,),
    make_potential=lambda: linear_potential(1.0),
    make_equilibrium=lambda gamma: isentropic_equilibrium(
        linear_potential(1.0), gamma, K0=1.0, rho0=1.0),
    make_boundary=_equilibrium_bc_1d, init=_eq_init_1d,
    reference="equilibrium",
    description="1D isentropic column held at rest"))

_register(CaseSpec(
    name="wb1d-perturb", dim=1, bounds=(0.0, 2.0), gamma=5.0 / 3.0,
    t_final=1.5, default_cells=(200,),
    make_potential=lambda: linear_potential(1.0),
    make_equilibrium=lambda gamma: isentropic_equilibrium(
        linear_potential(1.0), gamma, K0=1.0, rho0=1.0),
    make_boundary=_wb1d_perturb_bc, init=_eq_init_1d,
    reference="equilibrium",
    description="tiny sinusoidal velocity signal entering a balanced column"))

_register(CaseSpec(
    name="sod1d", dim=1, bounds=(-1.0, 1.0), gamma=1.4, t_final=0.4,
    default_cells=(200,),
    make_potential=lambda: linear_potential(1.0),
    make_equilibrium=lambda gamma: isothermal_equilibrium(
        linear_potential(1.0), rho0=1.0, p0=1.0, RT0=1.0),
    make_boundary=lambda **_: BoundarySpec1D(BoundaryCondition.reflective(),
                                             BoundaryCondition.reflective()),
    init=_sod_init,
    description="shock tube in a uniform gravity field"))

_register(CaseSpec(
    name="drf1d", dim=1, bounds=(-1.0, 1.0), gamma=1.4, t_final=0.6,
    default_cells=(800,),
    make_potential=lambda: quadratic_radial_potential(0.5),
    make_equilibrium=lambda gamma: isothermal_equilibrium(
        quadratic_radial_potential(0.5), rho0=1.0, p0=1.0, RT0=1.0),
    make_boundary=lambda **_: BoundarySpec1D(BoundaryCondition.outflow(),
                                             BoundaryCondition.outflow()),
    init=_drf1d_init,
    description="colliding outgoing rarefactions, near-vacuum center"))

_register(CaseSpec(
    name="wb2d", dim=2, bounds=(0.0, 1.0, 0.0, 1.0), gamma=1.4, t_final=1.0,
    default_cells=(40, 40),
    make_potential=lambda: linear_potential(1.0),
    make_equilibrium=lambda gamma: isothermal_equilibrium(
        linear_potential(1.0), rho0=1.21, p0=1.0),
    make_boundary=_equilibrium_bc_2d, init=_eq_init_2d,
    reference="equilibrium",
    description="2D isothermal atmosphere held at rest"))

_register(CaseSpec(
    name="wb2d-perturb", dim=2, bounds=(0.0, 1.0, 0.0, 1.0), gamma=1.4,
    t_final=0.15, default_cells=(100, 100),
    make_potential=lambda: linear_potential(1.0),
    make_equilibrium=lambda gamma: isothermal_equilibrium(
        linear_potential(1.0), rho0=1.21, p0=1.0),
    make_boundary=_equilibrium_bc_2d, init=_wb2d_perturb_init,
    reference="equilibrium",
    description="gaussian pressure bump on the 2D balanced atmosphere"))

_register(CaseSpec(
    name="accuracy2d", dim=2, bounds=(0.0, 2.0 * np.pi, 0.0, 2.0 * np.pi),
    gamma=1.4, t_final=0.5, default_cells=(40, 40),
    make_potential=lambda: linear_potential(1.0),
    make_equilibrium=None,
    make_boundary=_accuracy2d_bc, init=_accuracy2d_init,
    exact=_accuracy2d_exact, reference="exact",
    description="smooth traveling wave with exact solution"))

_register(CaseSpec(
    name="drf2d", dim=2, bounds=(-0.5, 0.5, -0.5, 0.5), gamma=1.4,
    t_final=0.1, default_cells=(200, 200),
    make_potential=lambda: quadratic_radial_potential(0.5),
    make_equilibrium=lambda gamma: isothermal_equilibrium(
        quadratic_radial_potential(0.5), rho0=1.0, p0=0.4, RT0=0.4),
    # supersonic outflow in x; walls in y (copy-ghost outflow there feeds
    # the gravity-driven infall that develops once the core evacuates)
    make_boundary=lambda **_: BoundarySpec2D(BoundaryCondition.outflow(),
                                             BoundaryCondition.outflow(),
                                             BoundaryCondition.reflective(),
                                             BoundaryCondition.reflective()),
    init=_drf2d_init,
    description="2D double rarefaction, near-vacuum core"))

_register(CaseSpec(
    name="rt2d", dim=2, bounds=(0.0, 12.0, 0.0, 12.0), gamma=1.4,
    t_final=5.0, default_cells=(120, 120),
    make_potential=radial_potential,
    make_equilibrium=lambda gamma: isothermal_equilibrium(
        radial_potential(), rho0=1.0, p0=1.0, RT0=1.0),
    make_boundary=_rt2d_bc, init=_rt2d_init,
    reference="equilibrium", slow=True,
    description="radial Rayleigh-Taylor quadrant with far-field equilibrium"))

_register(CaseSpec(
    name="igw2d", dim=2, bounds=(0.0, 300000.0, 0.0, 10000.0), gamma=1.4,
    t_final=3000.0, default_cells=(300, 10),
    make_potential=lambda: vertical_potential(IGW_G),
    make_equilibrium=lambda gamma: inertia_gravity_background(
        gamma=gamma, p0=IGW_P0, T0=IGW_T0, N_freq=IGW_N, R=IGW_R, g=IGW_G),
    make_boundary=_igw_bc, init=_igw_init,
    reference="equilibrium", slow=True,
    description="inertia-gravity wave in a stratified periodic channel"))


def get_case(name: str) -> CaseSpec:
    try:
        return CASES[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; "
                       f"available: {sorted(CASES)}") from None


# --------------------------------------------------------------------------
# run driver

def build_run(case: CaseSpec, cells: tuple | None = None, degree: int = 2,
              variant: SchemeVariant = SchemeVariant.WBESPP,
              kernels=None):
    """Instantiate grid, discretization, and the initial field for a case."""
    kernels = kernels if kernels is not None else get_kernels()
    gas = GasModel(gamma=case.gamma)
    basis = make_basis(degree)
    cells = cells if cells is not None else case.default_cells
    if case.dim == 1:
        grid = Grid1D(case.bounds[0], case.bounds[1], cells[0], basis)
        coords = (grid.x,)
    else:
        a, b, c, d = case.bounds
        grid = Grid2D(a, b, c, d, cells[0], cells[1], basis)
        coords = grid.node_mesh()
    eq = case.make_equilibrium(case.gamma) if case.make_equilibrium else None
    potential = case.make_potential() if case.make_potential else None
    boundary = case.make_boundary()
    disc = Discretization(grid, gas, variant, boundary, equilibrium=eq,
                          potential=potential, kernels=kernels)
    W = np.stack(np.broadcast_arrays(*case.init(*coords, eq)), axis=-1)
    U0 = physics.prim_to_cons(np.ascontiguousarray(W, dtype=float), gas)
    return grid, gas, disc, U0


def run_case(case: CaseSpec | str, cells: tuple | None = None,
             degree: int = 2,
             variant: SchemeVariant = SchemeVariant.WBESPP,
             control: StepControl = StepControl(),
             eps: float = 1e-13,
             integrator: str = "ssprk104",
             snapshot_times: tuple = (),
             max_steps: int | None = None,
             kernels=None) -> RunResult:
    """Advance a case to its final time, logging entropy and extrema."""
    if isinstance(case, str):
        case = get_case(case)
    grid, gas, disc, U = build_run(case, cells, degree, variant, kernels)
    limiter = LimiterParams(eps=eps, enabled=variant.limiting)
    if integrator == "ssprk104":
        def step(u, dt, t):
            return step_ssprk104(u, dt, disc, limiter, t,
                                 limit_per_stage=control.limit_per_stage)
    elif integrator == "euler":
        def step(u, dt, t):
            return step_forward_euler(u, dt, disc, limiter, t)
    else:
        raise ValueError(f"unknown integrator {integrator!r}")

    result = RunResult(case=case, variant=variant, grid=grid, disc=disc,
                       U=U, t=0.0, steps=0)
    # The positivity guarantee (dissipative interface flux plus scaling
    # limiter) ensures a small enough step always produces admissible cell
    # averages, so a failed step may be retried at half the step size.  The
    # ablations without that guarantee abort on the first failure instead.
    retry_ok = variant.flux_differencing and variant.limiting
    max_halvings = 40
    pending = sorted(set(snapshot_times))
    qw_flat = np.ascontiguousarray(grid.quad_weights()).reshape(-1)
    T = case.t_final
    t = 0.0
    step_no = 0
    t0 = time.perf_counter()
    try:
        while t < T * (1.0 - 1e-14):
            if max_steps is not None and step_no >= max_steps:
                break
            dt = compute_dt(U, disc, control)
            dt = min(dt, T - t)
            if pending and t + dt > pending[0] - 1e-14 * T:
                dt = min(dt, max(pending[0] - t, 1e-14 * T))
            halvings = 0
            while True:
                try:
                    Unew = step(U, dt, t)
                    break
                except (AdmissibilityError, ZeroDivisionError,
                        FloatingPointError, OverflowError):
                    # degenerate arithmetic near vacuum is the same symptom
                    # as an inadmissible average: the step was too large
                    if not retry_ok or halvings >= max_halvings:
                        raise
                    halvings += 1
                    result.retries += 1
                    dt *= 0.5
            U = Unew
            t += dt
            step_no += 1
            min_rho, min_p, S = disc.kernels.entropy_stats(
                U.reshape(-1, U.shape[-1]), qw_flat, gas.gamma)
            min_rho = float(min_rho)
            min_p = float(min_p)
            result.min_rho = min(result.min_rho, min_rho)
            result.min_p = min(result.min_p, min_p)
            result.entropy_log.append(
                (step_no, t, dt, float(S), min_rho, min_p))
            if pending and t >= pending[0] - 1e-12 * T:
                result.snapshots[pending.pop(0)] = U.copy()
            if max_steps is not None and step_no >= max_steps:
                break
    except AdmissibilityError as exc:
        result.aborted = f"t={t:.6g}, step={step_no + 1}: {exc}"
    except (ZeroDivisionError, FloatingPointError, OverflowError) as exc:
        # a scheme variant breaking down can drive intermediate quantities
        # to under/overflow before the admissibility checks see them; treat
        # the degenerate arithmetic itself as the abort
        result.aborted = (f"t={t:.6g}, step={step_no + 1}: numerical "
                          f"breakdown ({type(exc).__name__}: {exc})")
    result.U = U
    result.t = t
    result.steps = step_no
    result.wall_time = time.perf_counter() - t0
    return result


# --------------------------------------------------------------------------
# diagnostics

def error_norms(U: np.ndarray, Uref: np.ndarray, grid: Grid1D | Grid2D,
                component: int = 0) -> dict:
    """Discrete L1/L2/Linf of one conserved component.

    Gauss-Lobatto quadrature of the nodal errors, normalized by the domain
    measure (domain-averaged norms).
    """
    if U.shape != Uref.shape:
        raise ValueError(f"shape mismatch: {U.shape} vs {Uref.shape}")
    e = U[..., component] - Uref[..., component]
    wq = grid.quad_weights()
    measure = float(np.sum(wq))
    return {
        "L1": float(np.sum(wq * np.abs(e))) / measure,
        "L2": float(np.sqrt(np.sum(wq * e * e) / measure)),
        "Linf": float(np.max(np.abs(e))),
    }


def reference_field(case: CaseSpec, result: RunResult) -> np.ndarray:
    """Nodal reference values for the case's error measure."""
    if case.reference == "equilibrium":
        if result.disc.eqdata is None:
            raise ValueError(f"case {case.name} has no equilibrium")
        return result.disc.eqdata.U
    if case.reference == "exact":
        grid = result.grid
        coords = (grid.x,) if grid.dim == 1 else grid.node_mesh()
        W = np.stack(np.broadcast_arrays(*case.exact(*coords, result.t)),
                     axis=-1)
        return physics.prim_to_cons(np.ascontiguousarray(W, float),
                                    result.disc.gas)
    raise ValueError(f"case {case.name} has no error reference")


def perturbation_fields(result: RunResult) -> np.ndarray:
    """U minus the equilibrium interpolant, all components."""
    if result.disc.eqdata is None:
        raise ValueError("perturbation requires an attached equilibrium")
    return result.U - result.disc.eqdata.U


def convergence_table(case: CaseSpec | str, cell_counts,
                      degree: int = 2,
                      variant: SchemeVariant = SchemeVariant.WBESPP,
                      component: int = 0, **run_kwargs) -> list[dict]:
    """Error norms over a mesh sequence with observed orders log2(e_N/e_2N)."""
    if isinstance(case, str):
        case = get_case(case)
    rows = []
    for n in cell_counts:
        cells = (n,) if case.dim == 1 else (n, n)
        res = run_case(case, cells=cells, degree=degree, variant=variant,
                       **run_kwargs)
        if not res.completed:
            raise RuntimeError(f"{case.name} N={n} aborted: {res.aborted}")
        norms = error_norms(res.U, reference_field(case, res), res.grid,
                            component)
        row = {"N": n, **norms}
        if rows:
            prev = rows[-1]
            for key in ("L1", "L2", "Linf"):
                row[f"order_{key}"] = (math.log2(prev[key] / row[key])
                                       if row[key] > 0.0 and prev[key] > 0.0
                                       else float("nan"))
        rows.append(row)
    return rows


def reference_solution(case: CaseSpec | str, grid: Grid1D, factor: int = 4,
                       **run_kwargs) -> np.ndarray:
    """Self-hosted fine-mesh reference resampled onto a coarse 1D grid.

    Runs the full scheme at ``factor`` times the resolution and evaluates
    the fine nodal polynomials at the coarse node coordinates.
    """
    if isinstance(case, str):
        case = get_case(case)
    if case.dim != 1:
        raise NotImplementedError("fine-mesh references are 1D only")
    n_fine = grid.n_cells * factor
    res = run_case(case, cells=(n_fine,), degree=grid.basis.degree,
                   **run_kwargs)
    if not res.completed:
        raise RuntimeError(f"reference run aborted: {res.aborted}")
    fine = res.grid
    out = np.empty(grid.field_shape)
    dxf = fine.dx
    for i in range(grid.n_cells):
        for j in range(grid.basis.n_nodes):
            x = grid.x[i, j]
            cell = min(int((x - fine.a) / dxf), n_fine - 1)
            xc = fine.a + (cell + 0.5) * dxf
            xi = np.clip(2.0 * (x - xc) / dxf, -1.0, 1.0)
            E = lagrange_eval_matrix(fine.basis.nodes, np.array([xi]))
            out[i, j] = E[0] @ res.U[cell]
    return out
