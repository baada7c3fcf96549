"""Uniform structured grids with tensor-product Gauss-Lobatto node layouts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import GLBasis


def _node_coords(a: float, b: float, n: int, nodes: np.ndarray) -> np.ndarray:
    """Per-cell node coordinates, shape (n, k+1).

    Endpoint nodes are snapped onto the shared face coordinates so that
    adjacent cells hold bitwise-identical values there; continuous fields
    sampled at the nodes are then continuous across interfaces exactly.
    """
    faces = a + (b - a) * np.arange(n + 1) / n
    centers = 0.5 * (faces[:-1] + faces[1:])
    h = (b - a) / n
    x = centers[:, None] + 0.5 * h * nodes[None, :]
    x[:, 0] = faces[:-1]
    x[:, -1] = faces[1:]
    return x


@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    n_cells: int
    basis: GLBasis
    x: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_cells < 3:
            raise ValueError("need at least 3 cells")
        if self.b <= self.a:
            raise ValueError("empty domain")
        object.__setattr__(
            self, "x",
            _node_coords(self.a, self.b, self.n_cells, self.basis.nodes))

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.n_cells

    @property
    def dim(self) -> int:
        return 1

    @property
    def field_shape(self) -> tuple[int, ...]:
        return (self.n_cells, self.basis.n_nodes, 3)

    def quad_weights(self) -> np.ndarray:
        """Nodal quadrature weights of the global L2 inner product."""
        w = np.broadcast_to(0.5 * self.dx * self.basis.weights,
                            (self.n_cells, self.basis.n_nodes))
        return np.ascontiguousarray(w)


@dataclass(frozen=True)
class Grid2D:
    a: float
    b: float
    c: float
    d: float
    nx: int
    ny: int
    basis: GLBasis
    x: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError("need at least 3 cells per direction")
        if self.b <= self.a or self.d <= self.c:
            raise ValueError("empty domain")
        object.__setattr__(
            self, "x", _node_coords(self.a, self.b, self.nx, self.basis.nodes))
        object.__setattr__(
            self, "y", _node_coords(self.c, self.d, self.ny, self.basis.nodes))

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.nx

    @property
    def dy(self) -> float:
        return (self.d - self.c) / self.ny

    @property
    def dim(self) -> int:
        return 2

    @property
    def field_shape(self) -> tuple[int, ...]:
        m = self.basis.n_nodes
        return (self.nx, self.ny, m, m, 4)

    def node_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable node coordinates X[i, 1, i1, 1], Y[1, j, 1, j1]."""
        X = self.x[:, None, :, None]
        Y = self.y[None, :, None, :]
        return X, Y

    def quad_weights(self) -> np.ndarray:
        w = self.basis.weights
        ww = 0.25 * self.dx * self.dy * np.outer(w, w)
        out = np.broadcast_to(ww, (self.nx, self.ny, *ww.shape))
        return np.ascontiguousarray(out)
