import numpy as np
import pytest

from gravdg.fluxes import ec_flux, es_flux_lf, log_mean, physical_flux
from gravdg.physics import GasModel, entropy_vars, potential_psi, prim_to_cons

GAS = GasModel(gamma=1.4)
GAS53 = GasModel(gamma=5.0 / 3.0)


def random_states(n, dim, seed):
    rng = np.random.default_rng(seed)
    W = np.empty((n, dim + 2))
    W[:, 0] = rng.uniform(0.1, 10.0, n)
    W[:, 1:-1] = rng.uniform(-3.0, 3.0, (n, dim))
    W[:, -1] = rng.uniform(0.05, 10.0, n)
    return prim_to_cons(W, GAS)


# ---------------------------------------------------------------- log mean

def test_log_mean_against_longdouble():
    rng = np.random.default_rng(7)
    a = rng.uniform(0.05, 20.0, 2000)
    b = rng.uniform(0.05, 20.0, 2000)
    al, bl = a.astype(np.longdouble), b.astype(np.longdouble)
    exact = np.asarray((bl - al) / (np.log(bl) - np.log(al)), dtype=float)
    assert np.max(np.abs(log_mean(a, b) - exact) / exact) < 1e-13


def test_log_mean_taylor_branch():
    a = np.full(5, 1.0)
    deltas = np.array([0.0, 1e-12, 1e-8, 1e-6, 1e-3])
    b = a + deltas
    al, bl = a.astype(np.longdouble), b.astype(np.longdouble)
    with np.errstate(invalid="ignore"):
        exact = np.asarray((bl - al) / (np.log(bl) - np.log(al)), dtype=float)
    exact[0] = 1.0
    assert np.max(np.abs(log_mean(a, b) - exact)) < 1e-14


def test_log_mean_symmetric_and_bounded():
    rng = np.random.default_rng(8)
    a = rng.uniform(0.1, 5.0, 500)
    b = rng.uniform(0.1, 5.0, 500)
    m = log_mean(a, b)
    assert np.allclose(m, log_mean(b, a), rtol=1e-15)
    # geometric mean <= log mean <= arithmetic mean
    assert np.all(m >= np.sqrt(a * b) - 1e-13)
    assert np.all(m <= 0.5 * (a + b) + 1e-13)


def test_log_mean_rejects_nonpositive():
    with pytest.raises(ValueError):
        log_mean(-1.0, 2.0)
    with pytest.raises(ValueError):
        log_mean(1.0, 0.0)


# ----------------------------------------------------------- physical flux

def test_physical_flux_hand_value_1d():
    U = np.array([1.0, 2.0, 3.0])  # rho=1, u=2, p=0.4(3-2)=0.4
    F = physical_flux(U, GAS, 0)
    assert np.allclose(F, [2.0, 4.4, 6.8], atol=1e-14)


def test_physical_flux_hand_value_2d():
    U = np.array([1.0, 1.0, 2.0, 4.0])  # u=1, v=2, ke=2.5, p=0.6
    F = physical_flux(U, GAS, 0)
    G = physical_flux(U, GAS, 1)
    assert np.allclose(F, [1.0, 1.6, 2.0, 4.6], atol=1e-14)
    assert np.allclose(G, [2.0, 2.0, 4.6, 9.2], atol=1e-14)


# ----------------------------------------------------------------- EC flux

@pytest.mark.parametrize("dim,direction", [(1, 0), (2, 0), (2, 1)])
def test_ec_consistency(dim, direction):
    U = random_states(400, dim, seed=10 + direction)
    F = ec_flux(U, U, GAS, direction)
    assert np.max(np.abs(F - physical_flux(U, GAS, direction))) < 1e-12


@pytest.mark.parametrize("dim,direction", [(1, 0), (2, 0), (2, 1)])
def test_ec_symmetry(dim, direction):
    UL = random_states(400, dim, seed=20)
    UR = random_states(400, dim, seed=21)
    A = ec_flux(UL, UR, GAS, direction)
    B = ec_flux(UR, UL, GAS, direction)
    assert np.max(np.abs(A - B)) < 1e-12 * max(1.0, np.max(np.abs(A)))


@pytest.mark.parametrize("gas", [GAS, GAS53])
@pytest.mark.parametrize("dim,direction", [(1, 0), (2, 0), (2, 1)])
def test_ec_condition(gas, dim, direction):
    """(V_R - V_L)^T F^S = psi_R - psi_L."""
    UL = random_states(2000, dim, seed=30 + direction)
    UR = random_states(2000, dim, seed=31 + direction)
    F = ec_flux(UL, UR, gas, direction)
    dV = entropy_vars(UR, gas) - entropy_vars(UL, gas)
    dpsi = potential_psi(UR, direction) - potential_psi(UL, direction)
    resid = np.sum(dV * F, axis=-1) - dpsi
    assert np.max(np.abs(resid)) < 1e-11


# ----------------------------------------------------------------- ES flux

@pytest.mark.parametrize("gas", [GAS, GAS53])
@pytest.mark.parametrize("dim,direction", [(1, 0), (2, 0), (2, 1)])
def test_es_inequality(gas, dim, direction):
    """(V_R - V_L)^T Fhat - (psi_R - psi_L) <= 0 (up to rounding)."""
    UL = random_states(2000, dim, seed=40 + direction)
    UR = random_states(2000, dim, seed=41 + direction)
    F = es_flux_lf(UL, UR, gas, direction)
    dV = entropy_vars(UR, gas) - entropy_vars(UL, gas)
    dpsi = potential_psi(UR, direction) - potential_psi(UL, direction)
    prod = np.sum(dV * F, axis=-1) - dpsi
    assert prod.max() <= 1e-12


def test_es_consistency():
    U = random_states(200, 1, seed=50)
    F = es_flux_lf(U, U, GAS, 0)
    assert np.max(np.abs(F - physical_flux(U, GAS, 0))) < 1e-12
