"""Compiled RK4 kernel for batches of rigid-body intervals.

The predictive controller integrates hundreds of short, independent
intervals per iteration (finite-difference probes, line-search trials);
numpy call overhead dominates at those batch sizes, so the per-row loop
is compiled. The math mirrors :func:`trqftc.model.rigid_body_batch`.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .model import PITCH_LIMIT


@njit(cache=True, inline="always")
def _deriv(x, f, t, e, m, g, ixx, iyy, izz, out):
    r, p, y = x[6], x[7], x[8]
    wx, wy, wz = x[9], x[10], x[11]
    cr, sr = math.cos(r), math.sin(r)
    cp, sp = math.cos(p), math.sin(p)
    cy, sy = math.cos(y), math.sin(y)
    fx, fy, fz = f[0], f[1], f[2]
    out[0] = x[3]
    out[1] = x[4]
    out[2] = x[5]
    out[3] = (cy * cp * fx + (cy * sp * sr - sy * cr) * fy + (cy * sp * cr + sy * sr) * fz) / m + e[0]
    out[4] = (sy * cp * fx + (sy * sp * sr + cy * cr) * fy + (sy * sp * cr - cy * sr) * fz) / m + e[1]
    out[5] = (-sp * fx + cp * sr * fy + cp * cr * fz) / m - g + e[2]
    tp = sp / cp
    out[6] = wx + sr * tp * wy + cr * tp * wz
    out[7] = cr * wy - sr * wz
    out[8] = (sr * wy + cr * wz) / cp
    er, ep, ey = e[3], e[4], e[5]
    out[9] = (t[0] + (iyy - izz) * wy * wz) / ixx + er - sp * ey
    out[10] = (t[1] + (izz - ixx) * wz * wx) / iyy + cr * ep + sr * cp * ey
    out[11] = (t[2] + (ixx - iyy) * wx * wy) / izz - sr * ep + cr * cp * ey


@njit(cache=True)
def rk4_rows(X, F, T, e, m, g, ixx, iyy, izz, h, substeps):
    """Integrate every row of ``X`` over ``substeps`` RK4 steps of ``h``.

    Rows that reach the pitch singularity come back as NaN and are flagged
    in the returned boolean mask.
    """
    n = X.shape[0]
    out = np.empty_like(X)
    bad = np.zeros(n, dtype=np.bool_)
    x = np.empty(12)
    z = np.empty(12)
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    for i in range(n):
        for j in range(12):
            x[j] = X[i, j]
        f = F[i]
        t = T[i]
        ok = True
        for _ in range(substeps):
            if not abs(x[7]) < PITCH_LIMIT:
                ok = False
                break
            _deriv(x, f, t, e, m, g, ixx, iyy, izz, k1)
            for j in range(12):
                z[j] = x[j] + 0.5 * h * k1[j]
            if not abs(z[7]) < PITCH_LIMIT:
                ok = False
                break
            _deriv(z, f, t, e, m, g, ixx, iyy, izz, k2)
            for j in range(12):
                z[j] = x[j] + 0.5 * h * k2[j]
            if not abs(z[7]) < PITCH_LIMIT:
                ok = False
                break
            _deriv(z, f, t, e, m, g, ixx, iyy, izz, k3)
            for j in range(12):
                z[j] = x[j] + h * k3[j]
            if not abs(z[7]) < PITCH_LIMIT:
                ok = False
                break
            _deriv(z, f, t, e, m, g, ixx, iyy, izz, k4)
            for j in range(12):
                x[j] = x[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        if ok:
            for j in range(12):
                out[i, j] = x[j]
        else:
            bad[i] = True
            for j in range(12):
                out[i, j] = np.nan
    return out, bad


@njit(cache=True)
def wrench_rows(U, pos, spins, perp, axial, tc, qc):
    """Body force and torque for each input row ``[alpha(4), zeta(4)]``."""
    n = U.shape[0]
    force = np.zeros((n, 3))
    torque = np.zeros((n, 3))
    for i in range(n):
        for r in range(4):
            a = U[i, r]
            z = U[i, 4 + r]
            thrust = max(0.0, (tc[0] * z + tc[1]) * z + tc[2])
            drag = spins[r] * max(0.0, (qc[0] * z + qc[1]) * z + qc[2])
            c, s = math.cos(a), math.sin(a)
            d0 = s * perp[r, 0] + (1.0 - c) * axial[r, 0]
            d1 = s * perp[r, 1] + (1.0 - c) * axial[r, 1]
            d2 = c + s * perp[r, 2] + (1.0 - c) * axial[r, 2]
            f0, f1, f2 = thrust * d0, thrust * d1, thrust * d2
            force[i, 0] += f0
            force[i, 1] += f1
            force[i, 2] += f2
            p0, p1, p2 = pos[r, 0], pos[r, 1], pos[r, 2]
            torque[i, 0] += p1 * f2 - p2 * f1 + drag * d0
            torque[i, 1] += p2 * f0 - p0 * f2 + drag * d1
            torque[i, 2] += p0 * f1 - p1 * f0 + drag * d2
    return force, torque
