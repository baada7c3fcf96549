import numpy as np
import pytest

from gravdg.basis import make_basis
from gravdg.equilibrium import isothermal_equilibrium, linear_potential
from gravdg.grid import Grid1D
from gravdg.limiter import LimiterParams
from gravdg.physics import AdmissibilityError, GasModel, prim_to_cons
from gravdg.solver import (BoundaryCondition, BoundarySpec1D, Discretization,
                           SchemeVariant)
from gravdg.timestep import (StepControl, compute_dt, step_forward_euler,
                             step_ssprk104)

GAS = GasModel(gamma=1.4)
PER = BoundarySpec1D(BoundaryCondition.periodic(), BoundaryCondition.periodic())


def uniform_disc(kernels, n=100, k=2, potential=None):
    grid = Grid1D(0.0, 1.0, n, make_basis(k))
    disc = Discretization(grid, GAS, SchemeVariant.WBESPP, PER,
                          potential=potential, kernels=kernels)
    W = np.ones(grid.field_shape)
    W[..., 1] = 0.0
    return grid, disc, prim_to_cons(W, GAS)


def test_dt_hand_value_gravity_free(kernels):
    # rho = p = 1, u = 0, dx = 0.01, k = 2: alpha = sqrt(1.4); no source term.
    # The positivity cap 0.99 * 6 * (omega0/4) / alpha = 0.99 * 0.5 dx/alpha
    # undercuts the advective 0.5 dx/alpha by exactly the safety factor.
    grid, disc, U = uniform_disc(kernels)
    dt = compute_dt(U, disc, StepControl())
    assert dt == pytest.approx(0.99 * 0.5 * 0.01 / np.sqrt(1.4), rel=1e-13)


def test_dt_strict_is_six_times_smaller_here(kernels):
    grid, disc, U = uniform_disc(kernels)
    loose = compute_dt(U, disc, StepControl())
    strict = compute_dt(U, disc, StepControl(strict_pp=True))
    assert strict == pytest.approx(loose / 6.0, rel=1e-13)


def test_dt_source_bound_engages(kernels):
    # a strong potential makes the source bound the binding constraint
    _, disc, U = uniform_disc(kernels, potential=linear_potential(5000.0))
    _, disc0, _ = uniform_disc(kernels)
    assert compute_dt(U, disc, StepControl()) < compute_dt(U, disc0, StepControl())


def test_dt_rejects_inadmissible(kernels):
    _, disc, U = uniform_disc(kernels, n=10)
    U[0, 0, 0] = -1.0
    with pytest.raises(AdmissibilityError):
        compute_dt(U, disc, StepControl())


def test_step_control_validation():
    with pytest.raises(ValueError):
        StepControl(cfl=0.0)
    with pytest.raises(ValueError):
        StepControl(cfl=1.5)
    with pytest.raises(ValueError):
        StepControl(pp_safety=0.0)


class _ScalarODE:
    """Stub spatial operator: U' = -U (limiter disabled, so the grid and
    kernel hooks are never exercised)."""

    grid = None
    gas = GAS
    kernels = None

    @staticmethod
    def rhs(U, t):
        return -U


def test_ssprk104_is_fourth_order():
    disc = _ScalarODE()
    lim = LimiterParams(enabled=False)
    errs = []
    for nsteps in (10, 20, 40):
        dt = 1.0 / nsteps
        U = np.array([1.0])
        t = 0.0
        for _ in range(nsteps):
            U = step_ssprk104(U, dt, disc, lim, t)
            t += dt
        errs.append(abs(U[0] - np.exp(-1.0)))
    o1 = np.log2(errs[0] / errs[1])
    o2 = np.log2(errs[1] / errs[2])
    assert o1 > 3.7 and o2 > 3.7


def test_forward_euler_step_exact_for_constant_rhs():
    class Const:
        grid = None
        gas = GAS
        kernels = None

        @staticmethod
        def rhs(U, t):
            return np.full_like(U, 2.0)

    U = np.array([1.0, 3.0])
    out = step_forward_euler(U, 0.25, Const(), LimiterParams(enabled=False))
    assert np.array_equal(out, [1.5, 3.5])
    assert np.array_equal(U, [1.0, 3.0])  # input untouched


def test_stage_tagged_failure(kernels):
    """An inadmissible state reached mid-step reports the failing stage."""
    grid, disc, U = uniform_disc(kernels, n=10)
    U[5, :, 1] = 30.0  # huge momentum: the first stage already explodes
    lim = LimiterParams(enabled=False)
    with pytest.raises(AdmissibilityError, match="stage"):
        step_ssprk104(U, 0.05, disc, lim)


def test_wb_fixed_point_under_time_stepping(kernels):
    """Equilibrium initial data stays put over many RK steps (rounding only)."""
    eq = isothermal_equilibrium(linear_potential(1.0))
    grid = Grid1D(0.0, 1.0, 10, make_basis(2))
    bc = BoundarySpec1D(BoundaryCondition.equilibrium(),
                        BoundaryCondition.equilibrium())
    disc = Discretization(grid, GAS, SchemeVariant.WBESPP, bc, equilibrium=eq,
                          kernels=kernels)
    U0 = disc.eqdata.U.copy()
    U = U0.copy()
    lim = LimiterParams()
    for _ in range(20):
        dt = compute_dt(U, disc, StepControl())
        U = step_ssprk104(U, dt, disc, lim)
    # rhs is exactly zero; only the RK recombination rounding remains
    assert np.max(np.abs(U - U0)) < 1e-13
