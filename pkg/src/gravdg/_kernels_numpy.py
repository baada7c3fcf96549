"""Vectorized numpy implementations of the hot kernels.

This is the fallback backend; `_kernels_numba` provides the jit-compiled
twin with identical semantics.  The contraction pattern used for the
flux-differencing volume terms is shared with the well-balanced source
factor precomputation, so that on an equilibrium interpolant the two
cancel to rounding.
"""

from __future__ import annotations

import warnings

import numpy as np

from . import fluxes
from .physics import GasModel

_GAS_CACHE: dict[float, GasModel] = {}


def _gas(gamma: float) -> GasModel:
    # gamma-range warnings are the configuration layer's job, not the kernels'
    g = _GAS_CACHE.get(gamma)
    if g is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            g = GasModel(gamma=gamma)
        _GAS_CACHE[gamma] = g
    return g


def phys_flux(U: np.ndarray, gamma: float, direction: int) -> np.ndarray:
    return fluxes.physical_flux(U, _gas(gamma), direction)


def lf_flux(UL: np.ndarray, UR: np.ndarray, gamma: float,
            direction: int) -> np.ndarray:
    return fluxes.es_flux_lf(UL, UR, _gas(gamma), direction)


def volume_1d(U: np.ndarray, Dmat: np.ndarray, gamma: float,
              ec: bool) -> np.ndarray:
    """Per-node volume term of the semi-discrete operator.

    ec=True:  vol[n, j, c] = sum_l Dmat[j, l] F^S(U[n, j], U[n, l])_c
    ec=False: vol[n, j, c] = sum_l Dmat[j, l] F(U[n, l])_c   (strong form)
    """
    gas = _gas(gamma)
    N, m, nc = U.shape
    vol = np.empty_like(U)
    if ec:
        FS = fluxes.ec_flux(U[:, :, None, :], U[:, None, :, :], gas, 0)
        for c in range(nc):
            vol[:, :, c] = np.einsum("jl,njl->nj", Dmat, FS[..., c])
    else:
        F = fluxes.physical_flux(U, gas, 0)
        for c in range(nc):
            vol[:, :, c] = np.einsum("jl,nl->nj", Dmat, F[..., c])
    return vol


def volume_2d(U: np.ndarray, Dmat: np.ndarray, gamma: float, ec: bool,
              direction: int) -> np.ndarray:
    """2D volume term along one coordinate line (direction 0: x, 1: y)."""
    gas = _gas(gamma)
    nc = U.shape[-1]
    vol = np.empty_like(U)
    if direction == 0:
        if ec:
            FS = fluxes.ec_flux(U[:, :, :, None, :, :], U[:, :, None, :, :, :],
                                gas, 0)
            for c in range(nc):
                vol[..., c] = np.einsum("ab,ijabk->ijak", Dmat, FS[..., c])
        else:
            F = fluxes.physical_flux(U, gas, 0)
            for c in range(nc):
                vol[..., c] = np.einsum("ab,ijbk->ijak", Dmat, F[..., c])
    else:
        if ec:
            GS = fluxes.ec_flux(U[:, :, :, :, None, :], U[:, :, :, None, :, :],
                                gas, 1)
            for c in range(nc):
                vol[..., c] = np.einsum("ab,ijkab->ijka", Dmat, GS[..., c])
        else:
            G = fluxes.physical_flux(U, gas, 1)
            for c in range(nc):
                vol[..., c] = np.einsum("ab,ijkb->ijka", Dmat, G[..., c])
    return vol


def first_bad(U: np.ndarray, gamma: float) -> int:
    """Index of the first node (row) with rho <= 0 or p <= 0, else -1."""
    ok = (U[:, 0] > 0.0) & (_pressure(U, gamma) > 0.0)
    if ok.all():
        return -1
    return int(np.argmax(~ok))


def assemble_2d(U, gxl, gxr, gyb, gyt, Dmat, gamma, ec, w0, wm, dx, dy,
                balanced, theta, xi, sx, sy, rho_e):
    """Full 2D semi-discrete tendency.

    Combines the interface fluxes (from interior traces plus the supplied
    ghost traces), the volume terms in both directions, the surface
    corrections, the gravity source, and the reference-element scaling.
    """
    nx, ny, m, _, nc = U.shape
    rho = U[..., 0]

    minus = np.empty((nx + 1, ny, m, nc))
    plus = np.empty((nx + 1, ny, m, nc))
    minus[0] = gxl
    minus[1:] = U[:, :, -1, :, :]
    plus[:nx] = U[:, :, 0, :, :]
    plus[nx] = gxr
    Fs = lf_flux(minus.reshape(-1, nc), plus.reshape(-1, nc),
                 gamma, 0).reshape(minus.shape)
    minus = np.empty((nx, ny + 1, m, nc))
    plus = np.empty((nx, ny + 1, m, nc))
    minus[:, 0] = gyb
    minus[:, 1:] = U[:, :, :, -1, :]
    plus[:, :ny] = U[:, :, :, 0, :]
    plus[:, ny] = gyt
    Gs = lf_flux(np.ascontiguousarray(minus.reshape(-1, nc)),
                 np.ascontiguousarray(plus.reshape(-1, nc)),
                 gamma, 1).reshape(minus.shape)

    volx = volume_2d(U, Dmat, gamma, ec, 0)
    FL = phys_flux(np.ascontiguousarray(
        U[:, :, 0, :, :].reshape(-1, nc)), gamma, 0).reshape(nx, ny, m, nc)
    FR = phys_flux(np.ascontiguousarray(
        U[:, :, -1, :, :].reshape(-1, nc)), gamma, 0).reshape(nx, ny, m, nc)
    rx = np.negative(volx, out=volx)
    np.subtract(Fs[:-1], FL, out=FL)
    FL /= w0
    rx[:, :, 0, :, :] += FL
    np.subtract(Fs[1:], FR, out=FR)
    FR /= wm
    rx[:, :, -1, :, :] -= FR
    buf = np.empty(rho.shape)
    if balanced:
        np.divide(rho, rho_e, out=buf)
        buf *= sx
    else:
        np.multiply(rho, theta, out=buf)
    rx[..., 1] += buf
    np.multiply(U[..., 1], theta, out=buf)
    rx[..., 3] += buf

    voly = volume_2d(U, Dmat, gamma, ec, 1)
    GB = phys_flux(np.ascontiguousarray(
        U[:, :, :, 0, :].reshape(-1, nc)), gamma, 1).reshape(nx, ny, m, nc)
    GT = phys_flux(np.ascontiguousarray(
        U[:, :, :, -1, :].reshape(-1, nc)), gamma, 1).reshape(nx, ny, m, nc)
    ry = np.negative(voly, out=voly)
    np.subtract(Gs[:, :-1], GB, out=GB)
    GB /= w0
    ry[:, :, :, 0, :] += GB
    np.subtract(Gs[:, 1:], GT, out=GT)
    GT /= wm
    ry[:, :, :, -1, :] -= GT
    if balanced:
        np.divide(rho, rho_e, out=buf)
        buf *= sy
    else:
        np.multiply(rho, xi, out=buf)
    ry[..., 2] += buf
    np.multiply(U[..., 2], xi, out=buf)
    ry[..., 3] += buf

    rx *= 2.0 / dx
    ry *= 2.0 / dy
    rx += ry
    return rx


def wave_source_bounds_2d(U, theta, xi, gamma):
    """Max directional wave speeds and min gravity-source bounds.

    Returns (ok, alpha_x, alpha_y, src_bound_x, src_bound_y); ok is False
    when any node has rho <= 0 or p <= 0.
    """
    rho = U[:, 0]
    p = _pressure(U, gamma)
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        return False, 0.0, 0.0, 0.0, 0.0
    c = np.sqrt(gamma * p / rho)
    ax = float(np.max(np.abs(U[:, 1] / rho) + c))
    ay = float(np.max(np.abs(U[:, 2] / rho) + c))
    beta = rho / (2.0 * p)

    def bound(factor):
        mask = np.abs(factor) > 0.0
        if not np.any(mask):
            return np.inf
        vals = (np.sqrt(1.0 / (2.0 * (gamma - 1.0) * beta[mask]))
                / (4.0 * np.abs(factor[mask])))
        return float(vals.min())

    return True, ax, ay, bound(theta), bound(xi)


def entropy_stats(U, qw, gamma):
    """Min density, min pressure, and quadrature of -rho s/(gamma-1)."""
    rho = U[:, 0]
    p = _pressure(U, gamma)
    ent = -rho * (np.log(p) - gamma * np.log(rho)) / (gamma - 1.0)
    return float(rho.min()), float(p.min()), float(np.sum(qw * ent))


def _pressure(U: np.ndarray, gamma: float) -> np.ndarray:
    # a non-positive density (possible at a node mid-limiting when the
    # scaling factor rounds to 1) counts as "below any positive floor"
    with np.errstate(divide="ignore", invalid="ignore"):
        ke = 0.5 * np.sum(U[..., 1:-1] ** 2, axis=-1) / U[..., 0]
        p = (gamma - 1.0) * (U[..., -1] - ke)
    return np.where(U[..., 0] > 0.0, p, -1.0)


def _pressure_root(avg: np.ndarray, Ut: np.ndarray, eps: np.ndarray,
                   gamma: float) -> np.ndarray:
    """Solve p((1-t) avg + t Ut) = eps for t in (0, 1], per row.

    The pressure condition multiplied by rho(t) is a quadratic in t; the
    closed-form root is used, with bisection as a fallback when rounding
    spoils the discriminant.
    """
    d = Ut - avg
    ef = eps / (gamma - 1.0)
    a = d[:, 0] * d[:, -1] - 0.5 * np.sum(d[:, 1:-1] ** 2, axis=1)
    b = (avg[:, 0] * d[:, -1] + avg[:, -1] * d[:, 0]
         - np.sum(avg[:, 1:-1] * d[:, 1:-1], axis=1) - ef * d[:, 0])
    c = (avg[:, 0] * avg[:, -1] - 0.5 * np.sum(avg[:, 1:-1] ** 2, axis=1)
         - ef * avg[:, 0])
    t = np.full(a.shape, np.nan)
    lin = np.abs(a) < 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(lin, -c / b, t)
        disc = b * b - 4.0 * a * c
        sq = np.sqrt(np.maximum(disc, 0.0))
        r1 = np.where(b >= 0.0, (-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a))
        den = a * r1  # can underflow to zero even when r1 != 0
        r2 = np.where(np.abs(den) > 0.0, c / den, np.nan)
    for r in (r1, r2):
        cand = ~lin & np.isnan(t) & (disc >= 0.0) & (r >= 0.0) & (r <= 1.0) \
            & (2.0 * a * r + b <= 0.0)
        t = np.where(cand, r, t)
    bad = ~np.isfinite(t) | (t < 0.0) | (t > 1.0)
    if np.any(bad):
        lo = np.zeros(np.count_nonzero(bad))
        hi = np.ones_like(lo)
        ab, bb, cb = a[bad], b[bad], c[bad]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            q = (ab * mid + bb) * mid + cb
            hi = np.where(q < 0.0, mid, hi)
            lo = np.where(q >= 0.0, mid, lo)
        t[bad] = 0.5 * (lo + hi)
    return t


def limit_cells(U: np.ndarray, wq: np.ndarray, eps: float,
                gamma: float) -> int:
    """Scaling positivity limiter, in place.

    U has shape (ncells, nnodes, ncomp); wq are quadrature weights summing
    to one.  Returns -1 on success, or the index of the first cell whose
    average is itself inadmissible (nothing the limiter can do there).

    The working floor is min(eps, rho_avg, p_avg) per cell, so cells whose
    averages sit below eps (but are still admissible) are limited onto
    their averages instead of being reported as failures.
    """
    avg = np.einsum("n,inc->ic", wq, U)
    p_avg = _pressure(avg, gamma)
    bad = (avg[:, 0] <= 0.0) | (p_avg <= 0.0)
    if np.any(bad):
        return int(np.argmax(bad))
    eps_rho = np.minimum(eps, avg[:, 0])
    eps_p = np.minimum(eps, p_avg)

    rho = U[:, :, 0]
    rho_m = rho.min(axis=1)
    stage1 = rho_m < eps_rho
    if np.any(stage1):
        denom = avg[stage1, 0] - rho_m[stage1]
        th1 = np.minimum((avg[stage1, 0] - eps_rho[stage1]) / denom, 1.0)
        U[stage1, :, 0] = (avg[stage1, 0, None]
                           + th1[:, None] * (rho[stage1] - avg[stage1, 0, None]))

    p = _pressure(U, gamma)
    need = p < eps_p[:, None]
    cells = np.any(need, axis=1)
    if np.any(cells):
        ci, ni = np.nonzero(need)
        t = _pressure_root(avg[ci], U[ci, ni], eps_p[ci], gamma)
        tmin = np.ones(U.shape[0])
        np.minimum.at(tmin, ci, t)
        idx = np.nonzero(cells)[0]
        th2 = tmin[idx]
        orig = U[idx].copy()
        # the closed-form root places p at the floor only up to rounding;
        # back the scaling off toward the (admissible) average until the
        # computed pressure clears it
        for attempt in range(31):
            U[idx] = (avg[idx, None, :]
                      + th2[:, None, None] * (orig - avg[idx, None, :]))
            still = np.any(_pressure(U[idx], gamma) < eps_p[idx, None], axis=1)
            if not np.any(still):
                break
            th2 = np.where(still, 0.0 if attempt == 29 else 0.9 * th2, th2)
    return -1
