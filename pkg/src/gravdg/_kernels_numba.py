"""Numba-compiled twins of the numpy kernels.

Scalar inner functions are shared between the volume terms, the interface
fluxes, and the node fluxes, so identical inputs take identical code paths
(this is what makes the well-balanced cancellation exact).
"""

from __future__ import annotations

import numpy as np
from numba import njit

_JIT = dict(cache=True, fastmath=False)


@njit(**_JIT)
def _log_mean(a, b):
    zeta = ((a - b) / (a + b)) ** 2
    if zeta < 1e-4:
        return 0.5 * (a + b) / (1.0 + zeta * (1.0 / 3.0 + zeta * (1.0 / 5.0 + zeta / 7.0)))
    return (b - a) / np.log(b / a)


@njit(**_JIT)
def _phys_1d(rho, m, E, gamma):
    u = m / rho
    p = (gamma - 1.0) * (E - 0.5 * m * u)
    return m, m * u + p, u * (E + p)


@njit(**_JIT)
def _phys_2d(rho, m, n, E, gamma, direction):
    u = m / rho
    v = n / rho
    p = (gamma - 1.0) * (E - 0.5 * (m * u + n * v))
    if direction == 0:
        return m, m * u + p, n * u, u * (E + p)
    return n, m * v, n * v + p, v * (E + p)


@njit(**_JIT)
def _ec_1d(rL, uL, pL, rR, uR, pR, gamma):
    bL = rL / (2.0 * pL)
    bR = rR / (2.0 * pR)
    r_ln = _log_mean(rL, rR)
    b_ln = _log_mean(bL, bR)
    r_a = 0.5 * (rL + rR)
    b_a = 0.5 * (bL + bR)
    u_a = 0.5 * (uL + uR)
    u2_a = 0.5 * (uL * uL + uR * uR)
    f1 = r_ln * u_a
    f2 = r_a / (2.0 * b_a) + u_a * f1
    f3 = (1.0 / (2.0 * (gamma - 1.0) * b_ln) - 0.5 * u2_a) * f1 + u_a * f2
    return f1, f2, f3


@njit(**_JIT)
def _ec_2d(rL, uL, vL, pL, rR, uR, vR, pR, gamma, direction):
    bL = rL / (2.0 * pL)
    bR = rR / (2.0 * pR)
    r_ln = _log_mean(rL, rR)
    b_ln = _log_mean(bL, bR)
    r_a = 0.5 * (rL + rR)
    b_a = 0.5 * (bL + bR)
    u_a = 0.5 * (uL + uR)
    v_a = 0.5 * (vL + vR)
    ke = 0.5 * (0.5 * (uL * uL + uR * uR) + 0.5 * (vL * vL + vR * vR))
    if direction == 0:
        f1 = r_ln * u_a
        f2 = u_a * f1 + r_a / (2.0 * b_a)
        f3 = v_a * f1
    else:
        f1 = r_ln * v_a
        f2 = u_a * f1
        f3 = v_a * f1 + r_a / (2.0 * b_a)
    f4 = (1.0 / (2.0 * (gamma - 1.0) * b_ln) - ke) * f1 + u_a * f2 + v_a * f3
    return f1, f2, f3, f4


@njit(**_JIT)
def _alpha_lf(rL, uL, pL, rR, uR, pR, gamma):
    cL = np.sqrt(gamma * pL / rL)
    cR = np.sqrt(gamma * pR / rR)
    expo = (gamma - 1.0) / (2.0 * gamma)
    num = cL + cR - 0.5 * (gamma - 1.0) * (uR - uL)
    pstar = 1e-300
    if num > 0.0:
        pstar = (num / (cL * pL ** -expo + cR * pR ** -expo)) ** (1.0 / expo)
        if pstar < 1e-300:
            pstar = 1e-300
    gfac = (gamma + 1.0) / (2.0 * gamma)
    qL = (pstar - pL) / pL
    qR = (pstar - pR) / pR
    lamL = uL - cL * np.sqrt(1.0 + gfac * (qL if qL > 0.0 else 0.0))
    lamR = uR + cR * np.sqrt(1.0 + gfac * (qR if qR > 0.0 else 0.0))
    a = abs(lamL)
    if abs(lamR) > a:
        a = abs(lamR)
    if abs(uL) + cL > a:
        a = abs(uL) + cL
    if abs(uR) + cR > a:
        a = abs(uR) + cR
    return a


@njit(**_JIT)
def phys_flux(U, gamma, direction):
    n, nc = U.shape
    out = np.empty_like(U)
    if nc == 3:
        for i in range(n):
            f1, f2, f3 = _phys_1d(U[i, 0], U[i, 1], U[i, 2], gamma)
            out[i, 0] = f1
            out[i, 1] = f2
            out[i, 2] = f3
    else:
        for i in range(n):
            f1, f2, f3, f4 = _phys_2d(U[i, 0], U[i, 1], U[i, 2], U[i, 3],
                                      gamma, direction)
            out[i, 0] = f1
            out[i, 1] = f2
            out[i, 2] = f3
            out[i, 3] = f4
    return out


@njit(**_JIT)
def lf_flux(UL, UR, gamma, direction):
    n, nc = UL.shape
    out = np.empty_like(UL)
    if nc == 3:
        for i in range(n):
            rL = UL[i, 0]
            rR = UR[i, 0]
            uL = UL[i, 1] / rL
            uR = UR[i, 1] / rR
            pL = (gamma - 1.0) * (UL[i, 2] - 0.5 * UL[i, 1] * uL)
            pR = (gamma - 1.0) * (UR[i, 2] - 0.5 * UR[i, 1] * uR)
            alpha = _alpha_lf(rL, uL, pL, rR, uR, pR, gamma)
            fL1, fL2, fL3 = _phys_1d(UL[i, 0], UL[i, 1], UL[i, 2], gamma)
            fR1, fR2, fR3 = _phys_1d(UR[i, 0], UR[i, 1], UR[i, 2], gamma)
            out[i, 0] = 0.5 * (fL1 + fR1) - 0.5 * alpha * (UR[i, 0] - UL[i, 0])
            out[i, 1] = 0.5 * (fL2 + fR2) - 0.5 * alpha * (UR[i, 1] - UL[i, 1])
            out[i, 2] = 0.5 * (fL3 + fR3) - 0.5 * alpha * (UR[i, 2] - UL[i, 2])
    else:
        for i in range(n):
            rL = UL[i, 0]
            rR = UR[i, 0]
            uL = UL[i, 1 + direction] / rL
            uR = UR[i, 1 + direction] / rR
            pL = (gamma - 1.0) * (UL[i, 3]
                                  - 0.5 * (UL[i, 1] ** 2 + UL[i, 2] ** 2) / rL)
            pR = (gamma - 1.0) * (UR[i, 3]
                                  - 0.5 * (UR[i, 1] ** 2 + UR[i, 2] ** 2) / rR)
            alpha = _alpha_lf(rL, uL, pL, rR, uR, pR, gamma)
            fL1, fL2, fL3, fL4 = _phys_2d(UL[i, 0], UL[i, 1], UL[i, 2],
                                          UL[i, 3], gamma, direction)
            fR1, fR2, fR3, fR4 = _phys_2d(UR[i, 0], UR[i, 1], UR[i, 2],
                                          UR[i, 3], gamma, direction)
            out[i, 0] = 0.5 * (fL1 + fR1) - 0.5 * alpha * (UR[i, 0] - UL[i, 0])
            out[i, 1] = 0.5 * (fL2 + fR2) - 0.5 * alpha * (UR[i, 1] - UL[i, 1])
            out[i, 2] = 0.5 * (fL3 + fR3) - 0.5 * alpha * (UR[i, 2] - UL[i, 2])
            out[i, 3] = 0.5 * (fL4 + fR4) - 0.5 * alpha * (UR[i, 3] - UL[i, 3])
    return out


@njit(**_JIT)
def volume_1d(U, Dmat, gamma, ec):
    N, m, nc = U.shape
    vol = np.zeros_like(U)
    if ec:
        rho = np.empty(m)
        u = np.empty(m)
        p = np.empty(m)
        for n in range(N):
            for j in range(m):
                rho[j] = U[n, j, 0]
                u[j] = U[n, j, 1] / rho[j]
                p[j] = (gamma - 1.0) * (U[n, j, 2] - 0.5 * U[n, j, 1] * u[j])
            # one evaluation per unordered pair: the two-point flux is
            # symmetric, so the (j,l) and (l,j) entries share it
            for j in range(m):
                for l in range(j, m):
                    f1, f2, f3 = _ec_1d(rho[j], u[j], p[j],
                                        rho[l], u[l], p[l], gamma)
                    d = Dmat[j, l]
                    vol[n, j, 0] += d * f1
                    vol[n, j, 1] += d * f2
                    vol[n, j, 2] += d * f3
                    if l > j:
                        d = Dmat[l, j]
                        vol[n, l, 0] += d * f1
                        vol[n, l, 1] += d * f2
                        vol[n, l, 2] += d * f3
    else:
        F = np.empty((m, 3))
        for n in range(N):
            for l in range(m):
                f1, f2, f3 = _phys_1d(U[n, l, 0], U[n, l, 1], U[n, l, 2],
                                      gamma)
                F[l, 0] = f1
                F[l, 1] = f2
                F[l, 2] = f3
            for j in range(m):
                for l in range(m):
                    d = Dmat[j, l]
                    for c in range(3):
                        vol[n, j, c] += d * F[l, c]
    return vol


@njit(**_JIT)
def volume_2d(U, Dmat, gamma, ec, direction):
    Nx, Ny, m, m2, nc = U.shape
    vol = np.zeros_like(U)
    rho = np.empty((m, m))
    u = np.empty((m, m))
    v = np.empty((m, m))
    p = np.empty((m, m))
    F = np.empty((m, 4))
    for i in range(Nx):
        for j in range(Ny):
            for a in range(m):
                for b in range(m):
                    r = U[i, j, a, b, 0]
                    rho[a, b] = r
                    u[a, b] = U[i, j, a, b, 1] / r
                    v[a, b] = U[i, j, a, b, 2] / r
                    p[a, b] = (gamma - 1.0) * (
                        U[i, j, a, b, 3]
                        - 0.5 * (U[i, j, a, b, 1] * u[a, b]
                                 + U[i, j, a, b, 2] * v[a, b]))
            if direction == 0:
                for b in range(m):      # fixed y-node, differencing along x
                    if ec:
                        # symmetric two-point flux: one evaluation per
                        # unordered pair serves both matrix entries
                        for a in range(m):
                            for l in range(a, m):
                                f1, f2, f3, f4 = _ec_2d(
                                    rho[a, b], u[a, b], v[a, b], p[a, b],
                                    rho[l, b], u[l, b], v[l, b], p[l, b],
                                    gamma, 0)
                                d = Dmat[a, l]
                                vol[i, j, a, b, 0] += d * f1
                                vol[i, j, a, b, 1] += d * f2
                                vol[i, j, a, b, 2] += d * f3
                                vol[i, j, a, b, 3] += d * f4
                                if l > a:
                                    d = Dmat[l, a]
                                    vol[i, j, l, b, 0] += d * f1
                                    vol[i, j, l, b, 1] += d * f2
                                    vol[i, j, l, b, 2] += d * f3
                                    vol[i, j, l, b, 3] += d * f4
                    else:
                        for l in range(m):
                            f1, f2, f3, f4 = _phys_2d(
                                rho[l, b], rho[l, b] * u[l, b],
                                rho[l, b] * v[l, b],
                                U[i, j, l, b, 3], gamma, 0)
                            F[l, 0] = f1
                            F[l, 1] = f2
                            F[l, 2] = f3
                            F[l, 3] = f4
                        for a in range(m):
                            for l in range(m):
                                d = Dmat[a, l]
                                for c in range(4):
                                    vol[i, j, a, b, c] += d * F[l, c]
            else:
                for a in range(m):      # fixed x-node, differencing along y
                    if ec:
                        for b in range(m):
                            for l in range(b, m):
                                f1, f2, f3, f4 = _ec_2d(
                                    rho[a, b], u[a, b], v[a, b], p[a, b],
                                    rho[a, l], u[a, l], v[a, l], p[a, l],
                                    gamma, 1)
                                d = Dmat[b, l]
                                vol[i, j, a, b, 0] += d * f1
                                vol[i, j, a, b, 1] += d * f2
                                vol[i, j, a, b, 2] += d * f3
                                vol[i, j, a, b, 3] += d * f4
                                if l > b:
                                    d = Dmat[l, b]
                                    vol[i, j, a, l, 0] += d * f1
                                    vol[i, j, a, l, 1] += d * f2
                                    vol[i, j, a, l, 2] += d * f3
                                    vol[i, j, a, l, 3] += d * f4
                    else:
                        for l in range(m):
                            f1, f2, f3, f4 = _phys_2d(
                                rho[a, l], rho[a, l] * u[a, l],
                                rho[a, l] * v[a, l],
                                U[i, j, a, l, 3], gamma, 1)
                            F[l, 0] = f1
                            F[l, 1] = f2
                            F[l, 2] = f3
                            F[l, 3] = f4
                        for b in range(m):
                            for l in range(m):
                                d = Dmat[b, l]
                                for c in range(4):
                                    vol[i, j, a, b, c] += d * F[l, c]
    return vol


@njit(**_JIT)
def first_bad(U, gamma):
    """Index of the first node (row) with rho <= 0 or p <= 0, else -1."""
    n, nc = U.shape
    for i in range(n):
        r = U[i, 0]
        if not r > 0.0:
            return i
        ke = 0.0
        for c in range(1, nc - 1):
            ke += U[i, c] * U[i, c]
        p = (gamma - 1.0) * (U[i, nc - 1] - 0.5 * ke / r)
        if not p > 0.0:
            return i
    return -1


@njit(**_JIT)
def _lf_node_2d(l0, l1, l2, l3, r0, r1, r2, r3, gamma, direction):
    """Dissipative interface flux for one face node; same arithmetic as
    the batched ``lf_flux`` kernel."""
    uL = (l1 if direction == 0 else l2) / l0
    uR = (r1 if direction == 0 else r2) / r0
    pL = (gamma - 1.0) * (l3 - 0.5 * (l1 ** 2 + l2 ** 2) / l0)
    pR = (gamma - 1.0) * (r3 - 0.5 * (r1 ** 2 + r2 ** 2) / r0)
    alpha = _alpha_lf(l0, uL, pL, r0, uR, pR, gamma)
    fL1, fL2, fL3, fL4 = _phys_2d(l0, l1, l2, l3, gamma, direction)
    fR1, fR2, fR3, fR4 = _phys_2d(r0, r1, r2, r3, gamma, direction)
    return (0.5 * (fL1 + fR1) - 0.5 * alpha * (r0 - l0),
            0.5 * (fL2 + fR2) - 0.5 * alpha * (r1 - l1),
            0.5 * (fL3 + fR3) - 0.5 * alpha * (r2 - l2),
            0.5 * (fL4 + fR4) - 0.5 * alpha * (r3 - l3))


@njit(**_JIT)
def assemble_2d(U, gxl, gxr, gyb, gyt, Dmat, gamma, ec, w0, wm, dx, dy,
                balanced, theta, xi, sx, sy, rho_e):
    """Full 2D semi-discrete tendency.

    Fuses the interface fluxes (from interior traces plus the supplied
    ghost traces), the per-cell volume terms in both directions, the
    surface corrections, the gravity source, and the reference-element
    scaling into a single pass, with the same per-node arithmetic as the
    separate kernels (the nodal boundary flux is the shared two-point
    routine, so the well-balanced cancellation stays exact).
    """
    Nx, Ny, m, m2, nc = U.shape
    out = np.empty_like(U)
    Fs = np.empty((Nx + 1, Ny, m, nc))
    Gs = np.empty((Nx, Ny + 1, m, nc))
    for j in range(Ny):
        for b in range(m):
            f1, f2, f3, f4 = _lf_node_2d(
                gxl[j, b, 0], gxl[j, b, 1], gxl[j, b, 2], gxl[j, b, 3],
                U[0, j, 0, b, 0], U[0, j, 0, b, 1],
                U[0, j, 0, b, 2], U[0, j, 0, b, 3], gamma, 0)
            Fs[0, j, b, 0] = f1
            Fs[0, j, b, 1] = f2
            Fs[0, j, b, 2] = f3
            Fs[0, j, b, 3] = f4
            f1, f2, f3, f4 = _lf_node_2d(
                U[Nx - 1, j, m - 1, b, 0], U[Nx - 1, j, m - 1, b, 1],
                U[Nx - 1, j, m - 1, b, 2], U[Nx - 1, j, m - 1, b, 3],
                gxr[j, b, 0], gxr[j, b, 1], gxr[j, b, 2], gxr[j, b, 3],
                gamma, 0)
            Fs[Nx, j, b, 0] = f1
            Fs[Nx, j, b, 1] = f2
            Fs[Nx, j, b, 2] = f3
            Fs[Nx, j, b, 3] = f4
    for fi in range(1, Nx):
        for j in range(Ny):
            for b in range(m):
                f1, f2, f3, f4 = _lf_node_2d(
                    U[fi - 1, j, m - 1, b, 0], U[fi - 1, j, m - 1, b, 1],
                    U[fi - 1, j, m - 1, b, 2], U[fi - 1, j, m - 1, b, 3],
                    U[fi, j, 0, b, 0], U[fi, j, 0, b, 1],
                    U[fi, j, 0, b, 2], U[fi, j, 0, b, 3], gamma, 0)
                Fs[fi, j, b, 0] = f1
                Fs[fi, j, b, 1] = f2
                Fs[fi, j, b, 2] = f3
                Fs[fi, j, b, 3] = f4
    for i in range(Nx):
        for a in range(m):
            f1, f2, f3, f4 = _lf_node_2d(
                gyb[i, a, 0], gyb[i, a, 1], gyb[i, a, 2], gyb[i, a, 3],
                U[i, 0, a, 0, 0], U[i, 0, a, 0, 1],
                U[i, 0, a, 0, 2], U[i, 0, a, 0, 3], gamma, 1)
            Gs[i, 0, a, 0] = f1
            Gs[i, 0, a, 1] = f2
            Gs[i, 0, a, 2] = f3
            Gs[i, 0, a, 3] = f4
            f1, f2, f3, f4 = _lf_node_2d(
                U[i, Ny - 1, a, m - 1, 0], U[i, Ny - 1, a, m - 1, 1],
                U[i, Ny - 1, a, m - 1, 2], U[i, Ny - 1, a, m - 1, 3],
                gyt[i, a, 0], gyt[i, a, 1], gyt[i, a, 2], gyt[i, a, 3],
                gamma, 1)
            Gs[i, Ny, a, 0] = f1
            Gs[i, Ny, a, 1] = f2
            Gs[i, Ny, a, 2] = f3
            Gs[i, Ny, a, 3] = f4
        for fj in range(1, Ny):
            for a in range(m):
                f1, f2, f3, f4 = _lf_node_2d(
                    U[i, fj - 1, a, m - 1, 0], U[i, fj - 1, a, m - 1, 1],
                    U[i, fj - 1, a, m - 1, 2], U[i, fj - 1, a, m - 1, 3],
                    U[i, fj, a, 0, 0], U[i, fj, a, 0, 1],
                    U[i, fj, a, 0, 2], U[i, fj, a, 0, 3], gamma, 1)
                Gs[i, fj, a, 0] = f1
                Gs[i, fj, a, 1] = f2
                Gs[i, fj, a, 2] = f3
                Gs[i, fj, a, 3] = f4
    cx = 2.0 / dx
    cy = 2.0 / dy
    rho = np.empty((m, m))
    u = np.empty((m, m))
    v = np.empty((m, m))
    p = np.empty((m, m))
    volx = np.empty((m, m, 4))
    voly = np.empty((m, m, 4))
    F = np.empty((m, 4))
    fLx = np.empty((m, 4))
    fRx = np.empty((m, 4))
    fBy = np.empty((m, 4))
    fTy = np.empty((m, 4))
    for i in range(Nx):
        for j in range(Ny):
            for a in range(m):
                for b in range(m):
                    r = U[i, j, a, b, 0]
                    rho[a, b] = r
                    u[a, b] = U[i, j, a, b, 1] / r
                    v[a, b] = U[i, j, a, b, 2] / r
                    p[a, b] = (gamma - 1.0) * (
                        U[i, j, a, b, 3]
                        - 0.5 * (U[i, j, a, b, 1] * u[a, b]
                                 + U[i, j, a, b, 2] * v[a, b]))
                    for c in range(4):
                        volx[a, b, c] = 0.0
                        voly[a, b, c] = 0.0
            if ec:
                # symmetric two-point flux: one evaluation per unordered
                # pair serves both matrix entries
                for b in range(m):
                    for a in range(m):
                        for l in range(a, m):
                            f1, f2, f3, f4 = _ec_2d(
                                rho[a, b], u[a, b], v[a, b], p[a, b],
                                rho[l, b], u[l, b], v[l, b], p[l, b],
                                gamma, 0)
                            d = Dmat[a, l]
                            volx[a, b, 0] += d * f1
                            volx[a, b, 1] += d * f2
                            volx[a, b, 2] += d * f3
                            volx[a, b, 3] += d * f4
                            if l > a:
                                d = Dmat[l, a]
                                volx[l, b, 0] += d * f1
                                volx[l, b, 1] += d * f2
                                volx[l, b, 2] += d * f3
                                volx[l, b, 3] += d * f4
                for a in range(m):
                    for b in range(m):
                        for l in range(b, m):
                            f1, f2, f3, f4 = _ec_2d(
                                rho[a, b], u[a, b], v[a, b], p[a, b],
                                rho[a, l], u[a, l], v[a, l], p[a, l],
                                gamma, 1)
                            d = Dmat[b, l]
                            voly[a, b, 0] += d * f1
                            voly[a, b, 1] += d * f2
                            voly[a, b, 2] += d * f3
                            voly[a, b, 3] += d * f4
                            if l > b:
                                d = Dmat[l, b]
                                voly[a, l, 0] += d * f1
                                voly[a, l, 1] += d * f2
                                voly[a, l, 2] += d * f3
                                voly[a, l, 3] += d * f4
            else:
                for b in range(m):
                    for l in range(m):
                        f1, f2, f3, f4 = _phys_2d(
                            rho[l, b], rho[l, b] * u[l, b],
                            rho[l, b] * v[l, b],
                            U[i, j, l, b, 3], gamma, 0)
                        F[l, 0] = f1
                        F[l, 1] = f2
                        F[l, 2] = f3
                        F[l, 3] = f4
                    for a in range(m):
                        for l in range(m):
                            d = Dmat[a, l]
                            for c in range(4):
                                volx[a, b, c] += d * F[l, c]
                for a in range(m):
                    for l in range(m):
                        f1, f2, f3, f4 = _phys_2d(
                            rho[a, l], rho[a, l] * u[a, l],
                            rho[a, l] * v[a, l],
                            U[i, j, a, l, 3], gamma, 1)
                        F[l, 0] = f1
                        F[l, 1] = f2
                        F[l, 2] = f3
                        F[l, 3] = f4
                    for b in range(m):
                        for l in range(m):
                            d = Dmat[b, l]
                            for c in range(4):
                                voly[a, b, c] += d * F[l, c]
            for b in range(m):
                f1, f2, f3, f4 = _phys_2d(U[i, j, 0, b, 0], U[i, j, 0, b, 1],
                                          U[i, j, 0, b, 2], U[i, j, 0, b, 3],
                                          gamma, 0)
                fLx[b, 0] = f1
                fLx[b, 1] = f2
                fLx[b, 2] = f3
                fLx[b, 3] = f4
                f1, f2, f3, f4 = _phys_2d(
                    U[i, j, m - 1, b, 0], U[i, j, m - 1, b, 1],
                    U[i, j, m - 1, b, 2], U[i, j, m - 1, b, 3], gamma, 0)
                fRx[b, 0] = f1
                fRx[b, 1] = f2
                fRx[b, 2] = f3
                fRx[b, 3] = f4
            for a in range(m):
                f1, f2, f3, f4 = _phys_2d(U[i, j, a, 0, 0], U[i, j, a, 0, 1],
                                          U[i, j, a, 0, 2], U[i, j, a, 0, 3],
                                          gamma, 1)
                fBy[a, 0] = f1
                fBy[a, 1] = f2
                fBy[a, 2] = f3
                fBy[a, 3] = f4
                f1, f2, f3, f4 = _phys_2d(
                    U[i, j, a, m - 1, 0], U[i, j, a, m - 1, 1],
                    U[i, j, a, m - 1, 2], U[i, j, a, m - 1, 3], gamma, 1)
                fTy[a, 0] = f1
                fTy[a, 1] = f2
                fTy[a, 2] = f3
                fTy[a, 3] = f4
            for a in range(m):
                for b in range(m):
                    if balanced:
                        srcx = rho[a, b] / rho_e[i, j, a, b] * sx[i, j, a, b]
                        srcy = rho[a, b] / rho_e[i, j, a, b] * sy[i, j, a, b]
                    else:
                        srcx = rho[a, b] * theta[i, j, a, b]
                        srcy = rho[a, b] * xi[i, j, a, b]
                    ethx = U[i, j, a, b, 1] * theta[i, j, a, b]
                    ethy = U[i, j, a, b, 2] * xi[i, j, a, b]
                    for c in range(4):
                        vx = -volx[a, b, c]
                        if a == 0:
                            vx += (Fs[i, j, b, c] - fLx[b, c]) / w0
                        if a == m - 1:
                            vx -= (Fs[i + 1, j, b, c] - fRx[b, c]) / wm
                        if c == 1:
                            vx += srcx
                        elif c == 3:
                            vx += ethx
                        vy = -voly[a, b, c]
                        if b == 0:
                            vy += (Gs[i, j, a, c] - fBy[a, c]) / w0
                        if b == m - 1:
                            vy -= (Gs[i, j + 1, a, c] - fTy[a, c]) / wm
                        if c == 2:
                            vy += srcy
                        elif c == 3:
                            vy += ethy
                        out[i, j, a, b, c] = vx * cx + vy * cy
    return out


@njit(**_JIT)
def wave_source_bounds_2d(U, theta, xi, gamma):
    """Max directional wave speeds and min gravity-source bounds.

    Returns (ok, alpha_x, alpha_y, src_bound_x, src_bound_y); ok is False
    when any node has rho <= 0 or p <= 0.  Same per-node arithmetic as
    the vectorized step-size computation.
    """
    n, nc = U.shape
    s1 = 2.0 * (gamma - 1.0)
    ax = 0.0
    ay = 0.0
    sbx = np.inf
    sby = np.inf
    for i in range(n):
        r = U[i, 0]
        if not r > 0.0:
            return False, 0.0, 0.0, 0.0, 0.0
        p = (gamma - 1.0) * (U[i, 3]
                             - 0.5 * (U[i, 1] * U[i, 1]
                                      + U[i, 2] * U[i, 2]) / r)
        if not p > 0.0:
            return False, 0.0, 0.0, 0.0, 0.0
        c = np.sqrt(gamma * p / r)
        vx = abs(U[i, 1] / r) + c
        vy = abs(U[i, 2] / r) + c
        if vx > ax:
            ax = vx
        if vy > ay:
            ay = vy
        beta = r / (2.0 * p)
        root = np.sqrt(1.0 / (s1 * beta))
        th = abs(theta[i])
        if th > 0.0:
            val = root / (4.0 * th)
            if val < sbx:
                sbx = val
        x = abs(xi[i])
        if x > 0.0:
            val = root / (4.0 * x)
            if val < sby:
                sby = val
    return True, ax, ay, sbx, sby


@njit(**_JIT)
def entropy_stats(U, qw, gamma):
    """Min density, min pressure, and quadrature of -rho s/(gamma-1)."""
    n, nc = U.shape
    min_rho = np.inf
    min_p = np.inf
    S = 0.0
    for i in range(n):
        r = U[i, 0]
        ke = 0.0
        for c in range(1, nc - 1):
            ke += U[i, c] * U[i, c]
        p = (gamma - 1.0) * (U[i, nc - 1] - 0.5 * ke / r)
        if r < min_rho:
            min_rho = r
        if p < min_p:
            min_p = p
        S += qw[i] * (-r * (np.log(p) - gamma * np.log(r)) / (gamma - 1.0))
    return min_rho, min_p, S


@njit(**_JIT)
def _cell_pressure(W, gamma):
    # a non-positive density (possible at a node mid-limiting when the
    # scaling factor rounds to 1) counts as "below any positive floor"
    if not W[0] > 0.0:
        return -1.0
    ke = 0.0
    for c in range(1, W.shape[0] - 1):
        ke += W[c] * W[c]
    return (gamma - 1.0) * (W[-1] - 0.5 * ke / W[0])


@njit(**_JIT)
def _pressure_root_scalar(avg, Ut, eps, gamma):
    nc = avg.shape[0]
    ef = eps / (gamma - 1.0)
    d_rho = Ut[0] - avg[0]
    d_E = Ut[nc - 1] - avg[nc - 1]
    # accumulate the momentum sums first so the rounding matches the
    # vectorized implementation bit for bit
    sdd = 0.0
    sad = 0.0
    saa = 0.0
    for k in range(1, nc - 1):
        dm = Ut[k] - avg[k]
        sdd += dm * dm
        sad += avg[k] * dm
        saa += avg[k] * avg[k]
    a = d_rho * d_E - 0.5 * sdd
    b = avg[0] * d_E + avg[nc - 1] * d_rho - sad - ef * d_rho
    c = avg[0] * avg[nc - 1] - 0.5 * saa - ef * avg[0]
    t = -1.0
    if abs(a) < 1e-300:
        if b != 0.0:
            t = -c / b
    else:
        disc = b * b - 4.0 * a * c
        if disc >= 0.0:
            sq = np.sqrt(disc)
            if b >= 0.0:
                r1 = (-b - sq) / (2.0 * a)
            else:
                r1 = (-b + sq) / (2.0 * a)
            r2 = -1.0
            den = a * r1
            if den != 0.0:  # a*r1 can underflow to zero even when r1 != 0
                r2 = c / den
            for r in (r1, r2):
                if 0.0 <= r <= 1.0 and 2.0 * a * r + b <= 0.0:
                    t = r
                    break
    if not (0.0 <= t <= 1.0):
        lo = 0.0
        hi = 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            q = (a * mid + b) * mid + c
            if q < 0.0:
                hi = mid
            else:
                lo = mid
        t = 0.5 * (lo + hi)
    return t


@njit(**_JIT)
def limit_cells(U, wq, eps, gamma):
    ncells, nn, nc = U.shape
    avgs = np.empty((ncells, nc))
    # reject before mutating anything, so a failed call leaves U untouched
    for ic in range(ncells):
        for c in range(nc):
            s = 0.0
            for q in range(nn):
                s += wq[q] * U[ic, q, c]
            avgs[ic, c] = s
        if avgs[ic, 0] <= 0.0 or _cell_pressure(avgs[ic], gamma) <= 0.0:
            return ic
    for ic in range(ncells):
        avg = avgs[ic]
        # working floors: min(eps, cell averages), so averages below eps are
        # still limited (onto the average) rather than reported as failures
        eps_rho = eps if eps < avg[0] else avg[0]
        p_avg = _cell_pressure(avg, gamma)
        eps_p = eps if eps < p_avg else p_avg

        rho_m = U[ic, 0, 0]
        for q in range(1, nn):
            if U[ic, q, 0] < rho_m:
                rho_m = U[ic, q, 0]
        if rho_m < eps_rho:
            th1 = (avg[0] - eps_rho) / (avg[0] - rho_m)
            if th1 > 1.0:
                th1 = 1.0
            for q in range(nn):
                U[ic, q, 0] = avg[0] + th1 * (U[ic, q, 0] - avg[0])

        th2 = 1.0
        touched = False
        for q in range(nn):
            if _cell_pressure(U[ic, q], gamma) < eps_p:
                touched = True
                t = _pressure_root_scalar(avg, U[ic, q], eps_p, gamma)
                if t < th2:
                    th2 = t
        if touched:
            orig = U[ic].copy()
            # back off toward the admissible average until the computed
            # pressure clears the floor despite rounding in the root
            for attempt in range(31):
                for q in range(nn):
                    for c in range(nc):
                        U[ic, q, c] = avg[c] + th2 * (orig[q, c] - avg[c])
                ok = True
                for q in range(nn):
                    if _cell_pressure(U[ic, q], gamma) < eps_p:
                        ok = False
                        break
                if ok:
                    break
                th2 = 0.0 if attempt == 29 else 0.9 * th2
    return -1
