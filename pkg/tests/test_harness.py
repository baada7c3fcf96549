import numpy as np
import pytest

from gravdg import harness
from gravdg.basis import make_basis
from gravdg.grid import Grid1D
from gravdg.harness import (CASES, build_run, convergence_table, error_norms,
                            get_case, perturbation_fields,
                            potential_temperature, reference_field, run_case)
from gravdg.physics import GasModel
from gravdg.solver import SchemeVariant
from gravdg.timestep import StepControl


def test_get_case_unknown():
    with pytest.raises(KeyError, match="unknown case"):
        get_case("nope")


def test_case_registry_contents():
    expected = {"eqbm1", "eqbm2", "wb1d-perturb", "sod1d", "drf1d", "wb2d",
                "wb2d-perturb", "accuracy2d", "drf2d", "rt2d", "igw2d"}
    assert expected <= set(CASES)


SMALL = {  # smallest sensible mesh per case for a build + one rhs call
    1: (8,),
    2: (4, 4),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_every_case_builds_and_has_finite_rhs(name, kernels):
    case = get_case(name)
    cells = SMALL[case.dim]
    if name == "igw2d":
        cells = (12, 4)  # needs at least 3 cells per direction, wide channel
    grid, gas, disc, U = build_run(case, cells, 2, SchemeVariant.WBESPP,
                                   kernels)
    assert U.shape == grid.field_shape
    rhs = disc.rhs(U, 0.0)
    assert np.all(np.isfinite(rhs))


def test_run_case_snapshots_entropy_log_and_max_steps(kernels):
    res = run_case("sod1d", (24,), 2, SchemeVariant.WBESPP,
                   snapshot_times=(0.01,), max_steps=8, kernels=kernels)
    assert res.steps == 8
    assert not res.completed
    assert res.aborted is None
    assert len(res.entropy_log) == 8
    steps, times, dts, S, min_rho, min_p = zip(*res.entropy_log)
    assert list(steps) == list(range(1, 9))
    assert all(np.diff(times) > 0)
    assert 0.01 in res.snapshots
    assert res.snapshots[0.01].shape == res.U.shape


def test_error_norms_constant_error_oracle():
    grid = Grid1D(0.0, 2.0, 10, make_basis(2))
    U = np.zeros(grid.field_shape)
    Uref = U.copy()
    U[..., 0] = 0.5  # constant density error of 0.5 on a domain of measure 2
    norms = error_norms(U, Uref, grid, component=0)
    assert norms["L1"] == pytest.approx(0.5, rel=1e-14)
    assert norms["L2"] == pytest.approx(0.5, rel=1e-14)
    assert norms["Linf"] == pytest.approx(0.5, rel=1e-14)


def test_error_norms_shape_mismatch():
    grid = Grid1D(0.0, 1.0, 4, make_basis(1))
    with pytest.raises(ValueError, match="shape mismatch"):
        error_norms(np.zeros(grid.field_shape), np.zeros((3, 2, 3)), grid)


def test_perturbation_zero_at_equilibrium(kernels):
    res = run_case("eqbm1", (10,), 2, SchemeVariant.WBESPP, max_steps=0,
                   kernels=kernels)
    assert np.max(np.abs(perturbation_fields(res))) == 0.0


def test_reference_field_equilibrium_and_exact(kernels):
    res = run_case("eqbm1", (10,), 2, SchemeVariant.WBESPP, max_steps=0,
                   kernels=kernels)
    ref = reference_field(res.case, res)
    assert np.array_equal(ref, res.disc.eqdata.U)

    res2 = run_case("accuracy2d", (4, 4), 1, SchemeVariant.WBESPP,
                    max_steps=0, kernels=kernels)
    ref2 = reference_field(res2.case, res2)
    # at t = 0 the exact solution is the initial interpolant
    assert np.max(np.abs(ref2 - res2.U)) < 1e-12


def test_convergence_table_reports_orders(kernels):
    rows = convergence_table("eqbm1", (10, 20), degree=2,
                             variant=SchemeVariant.NON_WB, kernels=kernels)
    assert len(rows) == 2
    assert rows[0]["N"] == 10 and rows[1]["N"] == 20
    assert "order_L1" not in rows[0]
    assert rows[1]["order_L1"] > 2.0
    assert rows[1]["L1"] < rows[0]["L1"]


def test_potential_temperature_hand_value():
    gas = GasModel(gamma=1.4)
    # T = p/(R rho); with p = p0 the compressibility factor is 1
    W = np.array([1.0, 0.0, 0.0, harness.IGW_P0])
    theta = potential_temperature(W, gas)
    assert theta == pytest.approx(harness.IGW_P0 / harness.IGW_R, rel=1e-14)


def test_run_case_accepts_string_and_control(kernels):
    res = run_case("eqbm2", (10,), 2, SchemeVariant.WBESPP,
                   control=StepControl(cfl=0.25), max_steps=3, kernels=kernels)
    assert res.steps == 3
    assert res.min_rho > 0 and res.min_p > 0
