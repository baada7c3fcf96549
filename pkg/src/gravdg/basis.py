"""Gauss-Lobatto quadrature and the nodal SBP operator family on [-1, 1]."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_DEGREE = 8


def _legendre_and_deriv(k: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate P_k and P_k' by the three-term recurrence."""
    p0 = np.ones_like(x)
    if k == 0:
        return p0, np.zeros_like(x)
    p1 = x.copy()
    for n in range(1, k):
        p0, p1 = p1, ((2 * n + 1) * x * p1 - n * p0) / (n + 1)
    # P_k'(x) = k (x P_k - P_{k-1}) / (x^2 - 1), rewritten to avoid the poles
    dp = k * (x * p1 - p0) / np.where(np.abs(x) == 1.0, 1.0, x * x - 1.0)
    dp = np.where(x == 1.0, k * (k + 1) / 2.0, dp)
    dp = np.where(x == -1.0, (-1.0) ** (k - 1) * k * (k + 1) / 2.0, dp)
    return p1, dp


def gauss_lobatto(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the (k+1)-point Gauss-Lobatto rule on [-1, 1].

    Interior nodes are the roots of P_k', found by Newton iteration from
    Chebyshev-Gauss-Lobatto initial guesses and symmetrized afterwards so
    that X_l = -X_{k-l} holds exactly.
    """
    if not 1 <= k <= MAX_DEGREE:
        raise ValueError(f"degree k must be in [1, {MAX_DEGREE}], got {k}")
    x = -np.cos(np.pi * np.arange(k + 1) / k)
    x[0], x[-1] = -1.0, 1.0
    if k >= 2:
        xi = x[1:-1].copy()
        for _ in range(100):
            pk, dpk = _legendre_and_deriv(k, xi)
            # Newton on P_k'; P_k'' from the Legendre ODE
            d2 = (2.0 * xi * dpk - k * (k + 1) * pk) / (1.0 - xi * xi)
            step = dpk / d2
            xi -= step
            if np.max(np.abs(step)) < 1e-15:
                break
        x[1:-1] = xi
    x = 0.5 * (x - x[::-1])  # enforce exact antisymmetry
    x[0], x[-1] = -1.0, 1.0
    pk, _ = _legendre_and_deriv(k, x)
    w = 2.0 / (k * (k + 1) * pk * pk)
    w = 0.5 * (w + w[::-1])
    return x, w


def difference_matrix(nodes: np.ndarray) -> np.ndarray:
    """Lagrange derivative matrix D_{jl} = L_l'(X_j) via barycentric weights."""
    x = np.asarray(nodes, dtype=float)
    n = x.size
    if n < 2 or np.any(np.diff(x) <= 0):
        raise ValueError("nodes must be distinct and ascending")
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    bw = 1.0 / np.prod(diff, axis=1)
    d = np.empty((n, n))
    for j in range(n):
        for l in range(n):
            if j != l:
                d[j, l] = (bw[l] / bw[j]) / (x[j] - x[l])
        d[j, j] = 0.0
        d[j, j] = -np.sum(d[j])
    return d


@dataclass(frozen=True)
class GLBasis:
    """Gauss-Lobatto nodes/weights plus the D, M, S, B operator family."""

    degree: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    D: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)

    @property
    def M(self) -> np.ndarray:
        return np.diag(self.weights)

    @property
    def S(self) -> np.ndarray:
        return self.M @ self.D

    @property
    def B(self) -> np.ndarray:
        return np.diag(self.tau)

    @property
    def n_nodes(self) -> int:
        return self.degree + 1


def make_basis(k: int) -> GLBasis:
    nodes, weights = gauss_lobatto(k)
    tau = np.zeros(k + 1)
    tau[0], tau[-1] = -1.0, 1.0
    return GLBasis(degree=k, nodes=nodes, weights=weights,
                   D=difference_matrix(nodes), tau=tau)


def lagrange_eval_matrix(nodes: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Matrix E with E_{ij} = L_j(points_i), for resampling nodal data."""
    x = np.asarray(nodes, dtype=float)
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    bw = 1.0 / np.prod(diff, axis=1)
    e = np.empty((pts.size, x.size))
    for i, p in enumerate(pts):
        hit = np.isclose(p, x, rtol=0.0, atol=1e-14)
        if np.any(hit):
            e[i] = 0.0
            e[i, np.argmax(hit)] = 1.0
        else:
            terms = bw / (p - x)
            e[i] = terms / np.sum(terms)
    return e
