#!/usr/bin/env python3
"""Time the numba and numpy kernel backends against each other on the
hot paths: the 1D/2D semi-discrete operator and the positivity limiter.

Usage: python3 benchmarks/bench_backends.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gravdg.backend import available_backends, get_kernels
from gravdg.basis import make_basis
from gravdg.grid import Grid1D, Grid2D
from gravdg.limiter import LimiterParams, limit_field
from gravdg.physics import GasModel, prim_to_cons
from gravdg.solver import (BoundaryCondition, BoundarySpec1D, BoundarySpec2D,
                           Discretization, SchemeVariant)

GAS = GasModel(gamma=1.4)


def random_field(grid, dim, seed=0, noise=0.0):
    rng = np.random.default_rng(seed)
    W = np.empty(grid.field_shape)
    W[..., 0] = rng.uniform(0.5, 2.0, grid.field_shape[:-1])
    W[..., 1:-1] = rng.uniform(-1.0, 1.0, grid.field_shape[:-1] + (dim,))
    W[..., -1] = rng.uniform(0.5, 2.0, grid.field_shape[:-1])
    U = prim_to_cons(W, GAS)
    if noise:
        U += rng.normal(0.0, noise, U.shape)
    return U


def timeit(fn, repeat):
    fn()  # warm-up (includes JIT compilation for the numba backend)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(repeat):
    backends = available_backends()
    rows = []

    grid1 = Grid1D(0.0, 1.0, 2000, make_basis(2))
    bc1 = BoundarySpec1D(BoundaryCondition.periodic(),
                         BoundaryCondition.periodic())
    U1 = random_field(grid1, 1)

    grid2 = Grid2D(0.0, 1.0, 0.0, 1.0, 80, 80, make_basis(2))
    bc2 = BoundarySpec2D(*(BoundaryCondition.periodic() for _ in range(4)))
    U2 = random_field(grid2, 2)

    U1n = random_field(grid1, 1, seed=3, noise=0.2)

    for name in backends:
        kern = get_kernels(name)
        d1 = Discretization(grid1, GAS, SchemeVariant.WBESPP, bc1,
                            kernels=kern)
        d2 = Discretization(grid2, GAS, SchemeVariant.WBESPP, bc2,
                            kernels=kern)

        rows.append((name, "rhs 1D (2000 cells, k=2)",
                     timeit(lambda: d1.rhs(U1), repeat)))
        rows.append((name, "rhs 2D (80x80 cells, k=2)",
                     timeit(lambda: d2.rhs(U2), repeat)))

        params = LimiterParams()

        def run_limiter():
            V = U1n.copy()
            limit_field(V, grid1, params, GAS, kern)

        rows.append((name, "limiter 1D (2000 cells, noisy)",
                     timeit(run_limiter, repeat)))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = bench(args.repeat)
    print(f"{'backend':8s}  {'benchmark':32s}  {'best (ms)':>10s}")
    base = {}
    for name, label, sec in rows:
        base.setdefault(label, sec)
        speedup = base[label] / sec
        print(f"{name:8s}  {label:32s}  {sec * 1e3:10.2f}  "
              f"(x{speedup:.1f} vs first)")


if __name__ == "__main__":
    main()
