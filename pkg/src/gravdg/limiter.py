"""Cell-average-preserving scaling limiter for nodal density and pressure
positivity.  The per-cell work lives in the kernel backends; this module
owns parameters, field reshaping, and failure reporting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import physics
from .grid import Grid1D, Grid2D
from .physics import AdmissibilityError, GasModel

DEFAULT_EPS = 1e-13


@dataclass(frozen=True)
class LimiterParams:
    eps: float = DEFAULT_EPS
    enabled: bool = True

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")


def reference_cell_weights(grid: Grid1D | Grid2D) -> np.ndarray:
    """Flat nodal weights summing to one (the cell-average quadrature)."""
    w = grid.basis.weights
    if grid.dim == 1:
        return 0.5 * w
    return (0.25 * np.outer(w, w)).ravel()


def limit_field(U: np.ndarray, grid: Grid1D | Grid2D, params: LimiterParams,
                gas: GasModel, kernels, t: float = 0.0) -> None:
    """Limit every cell of the field in place.

    Raises AdmissibilityError when some cell average is itself outside the
    admissible set (the limiter cannot repair that; it signals a CFL
    violation upstream).
    """
    if not params.enabled:
        return
    nc = U.shape[-1]
    contig = U.flags["C_CONTIGUOUS"]
    work = U if contig else np.ascontiguousarray(U)
    if grid.dim == 1:
        flat = work
    else:
        m = grid.basis.n_nodes
        flat = work.reshape(grid.nx * grid.ny, m * m, nc)
    wq = reference_cell_weights(grid)
    bad = kernels.limit_cells(flat, wq, params.eps, gas.gamma)
    if not contig:
        U[...] = work
    if bad >= 0:
        if grid.dim == 1:
            where = (int(bad),)
        else:
            where = (int(bad) // grid.ny, int(bad) % grid.ny)
        raise AdmissibilityError(
            f"limiter: cell average inadmissible in cell {where}, t={t:.6g}")


def limit_cell(cell: np.ndarray, weights: np.ndarray, params: LimiterParams,
               gas: GasModel, kernels) -> np.ndarray:
    """Limit a single cell (nodal states stacked on the first axis)."""
    out = np.array(cell, dtype=float)[None, :, :].copy()
    bad = kernels.limit_cells(out, np.asarray(weights, float), params.eps,
                              gas.gamma)
    if bad >= 0:
        raise AdmissibilityError("limiter: cell average inadmissible")
    return out[0]


def total_cell_entropy(cell: np.ndarray, weights: np.ndarray,
                       gas: GasModel) -> float:
    """Weighted entropy of one cell's nodes (used by the limiter tests)."""
    return float(np.sum(np.asarray(weights) *
                        physics.entropy_function(cell, gas)))
