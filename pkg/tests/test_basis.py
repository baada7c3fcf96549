import numpy as np
import pytest

from gravdg.basis import (MAX_DEGREE, difference_matrix, gauss_lobatto,
                          lagrange_eval_matrix, make_basis)


def test_k1_nodes_weights_and_derivative():
    x, w = gauss_lobatto(1)
    assert np.allclose(x, [-1.0, 1.0], atol=0)
    assert np.allclose(w, [1.0, 1.0], atol=0)
    D = difference_matrix(x)
    assert np.allclose(D, [[-0.5, 0.5], [-0.5, 0.5]], atol=1e-15)


def test_k2_nodes_weights_and_derivative():
    x, w = gauss_lobatto(2)
    assert np.allclose(x, [-1.0, 0.0, 1.0], atol=1e-15)
    assert np.allclose(w, [1 / 3, 4 / 3, 1 / 3], rtol=1e-15)
    D = difference_matrix(x)
    expect = np.array([[-1.5, 2.0, -0.5],
                       [-0.5, 0.0, 0.5],
                       [0.5, -2.0, 1.5]])
    assert np.allclose(D, expect, atol=1e-14)


def test_k3_nodes_weights():
    x, w = gauss_lobatto(3)
    s = 1.0 / np.sqrt(5.0)
    assert np.allclose(x, [-1.0, -s, s, 1.0], atol=1e-15)
    assert np.allclose(w, [1 / 6, 5 / 6, 5 / 6, 1 / 6], rtol=1e-14)


@pytest.mark.parametrize("k", range(1, MAX_DEGREE + 1))
def test_quadrature_exactness(k):
    """(k+1)-point Gauss-Lobatto integrates degree 2k-1 exactly."""
    x, w = gauss_lobatto(k)
    for deg in range(2 * k):
        exact = (1.0 - (-1.0) ** (deg + 1)) / (deg + 1)
        assert abs(np.sum(w * x ** deg) - exact) < 1e-13
    assert np.isclose(np.sum(w), 2.0, atol=1e-14)


@pytest.mark.parametrize("k", range(1, MAX_DEGREE + 1))
def test_derivative_exact_on_polynomials(k):
    x, _ = gauss_lobatto(k)
    D = difference_matrix(x)
    for deg in range(k + 1):
        expect = deg * x ** max(deg - 1, 0) if deg > 0 else np.zeros_like(x)
        assert np.max(np.abs(D @ x ** deg - expect)) < 1e-12


@pytest.mark.parametrize("k", range(1, 7))
def test_sbp_identities(k):
    b = make_basis(k)
    assert np.max(np.abs(b.S + b.S.T - b.B)) <= 1e-14
    assert np.max(np.abs(b.D @ np.ones(k + 1))) <= 1e-13
    assert np.max(np.abs(b.S.sum(axis=0) - b.tau)) <= 1e-13


def test_node_symmetry():
    for k in range(1, MAX_DEGREE + 1):
        x, w = gauss_lobatto(k)
        assert np.array_equal(x, -x[::-1])
        assert np.array_equal(w, w[::-1])


def test_degree_out_of_range():
    with pytest.raises(ValueError):
        gauss_lobatto(0)
    with pytest.raises(ValueError):
        gauss_lobatto(MAX_DEGREE + 1)


def test_lagrange_eval_matrix_reproduces_polynomials():
    x, _ = gauss_lobatto(3)
    pts = np.linspace(-1.0, 1.0, 11)
    E = lagrange_eval_matrix(x, pts)
    for deg in range(4):
        assert np.max(np.abs(E @ x ** deg - pts ** deg)) < 1e-13


def test_lagrange_eval_matrix_identity_at_nodes():
    x, _ = gauss_lobatto(4)
    E = lagrange_eval_matrix(x, x)
    assert np.array_equal(E, np.eye(5))
