# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: upwind sweep, compensated functional reduction, CU rhs.

Arithmetic mirrors numpy_backend.py operation-for-operation; the build turns
FMA contraction off so both backends stay bit-identical.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

NAME = "cython"


def upwind_interior(double[:, :, ::1] u, double[:, :, ::1] out, int m,
                    double dt, double dx, double[::1] source,
                    int model_kind, double[::1] params):
    """Upwind sweep of slots j = 1..M into ``out``; boundary slots untouched."""
    cdef Py_ssize_t p = u.shape[0]
    cdef Py_ssize_t M = u.shape[1] - 2
    cdef Py_ssize_t Kp = u.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double dtdx = dt / dx
    cdef double coef, dtb, cur, upd
    cdef double vbar, g, hbar, inv2sq, t, dv, dh, c, base, lam
    if model_kind == 0:
        for i in range(p):
            coef = dtdx * params[i]
            dtb = dt * source[i]
            if i < m:
                for j in range(1, M + 1):
                    for k in range(Kp):
                        cur = u[i, j, k]
                        upd = cur - coef * (cur - u[i, j - 1, k])
                        if dtb != 0.0:
                            upd = upd - dtb * cur
                        out[i, j, k] = upd
            else:
                for j in range(1, M + 1):
                    for k in range(Kp):
                        cur = u[i, j, k]
                        upd = cur - coef * (u[i, j + 1, k] - cur)
                        if dtb != 0.0:
                            upd = upd - dtb * cur
                        out[i, j, k] = upd
    else:
        if p != 2 or m != 1:
            raise ValueError("state-dependent speeds support p=2, m=1 only")
        vbar = params[0]
        g = params[1]
        hbar = params[2]
        inv2sq = params[3]
        for j in range(1, M + 1):
            for k in range(Kp):
                # positive family: speed at (j, k)
                t = u[0, j, k] + u[1, j, k]
                dv = 0.5 * t
                dh = (u[0, j, k] - u[1, j, k]) * inv2sq
                c = sqrt(g * (hbar + dh))
                base = vbar + dv
                lam = base + c
                cur = u[0, j, k]
                upd = cur - (dtdx * lam) * (cur - u[0, j - 1, k])
                if source[0] != 0.0:
                    upd = upd - (dt * source[0]) * cur
                out[0, j, k] = upd
                # negative family: speed at (j+1, k)
                t = u[0, j + 1, k] + u[1, j + 1, k]
                dv = 0.5 * t
                dh = (u[0, j + 1, k] - u[1, j + 1, k]) * inv2sq
                c = sqrt(g * (hbar + dh))
                base = vbar + dv
                lam = base - c
                cur = u[1, j, k]
                upd = cur - (dtdx * lam) * (u[1, j + 1, k] - cur)
                if source[1] != 0.0:
                    upd = upd - (dt * source[1]) * cur
                out[1, j, k] = upd


def lyap_lanes(double[:, :, ::1] u, double[:, ::1] W2, Py_ssize_t jlo, Py_ssize_t jhi):
    """Neumaier-compensated sums of (u^2 * w_ij) along j = jlo..jhi-1 per (i, k) lane."""
    cdef Py_ssize_t p = u.shape[0]
    cdef Py_ssize_t Kp = u.shape[2]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] s_arr = np.zeros((p, Kp))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] c_arr = np.zeros((p, Kp))
    cdef double[:, ::1] s = s_arr
    cdef double[:, ::1] c = c_arr
    cdef Py_ssize_t i, j, k
    cdef double x, t, w, v
    for i in range(p):
        for j in range(jlo, jhi):
            w = W2[i, j]
            for k in range(Kp):
                v = u[i, j, k]
                x = (v * v) * w
                t = s[i, k] + x
                if fabs(s[i, k]) >= fabs(x):
                    c[i, k] = c[i, k] + ((s[i, k] - t) + x)
                else:
                    c[i, k] = c[i, k] + ((x - t) + s[i, k])
                s[i, k] = t
    return s_arr + c_arr


def family_stats(double[:, :, ::1] u, int m):
    """(sup |u|, max adjacent |difference|) over each family's meaningful slots."""
    cdef Py_ssize_t p = u.shape[0]
    cdef Py_ssize_t M = u.shape[1] - 2
    cdef Py_ssize_t Kp = u.shape[2]
    cdef Py_ssize_t i, j, k, lo, hi
    cdef double sup = 0.0, dmax = 0.0, a, d
    for i in range(p):
        if i < m:
            lo = 0
            hi = M
        else:
            lo = 1
            hi = M + 1
        for j in range(lo, hi + 1):
            for k in range(Kp):
                a = fabs(u[i, j, k])
                if a > sup:
                    sup = a
                if j > lo:
                    d = fabs(u[i, j, k] - u[i, j - 1, k])
                    if d > dmax:
                        dmax = d
    return sup, dmax


def cell_stats(double[:, :, ::1] avg):
    """(sup |avg|, max adjacent |difference|) over a bare cell-average array."""
    cdef Py_ssize_t p = avg.shape[0]
    cdef Py_ssize_t Mc = avg.shape[1]
    cdef Py_ssize_t Kp = avg.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double sup = 0.0, dmax = 0.0, a, d
    for i in range(p):
        for j in range(Mc):
            for k in range(Kp):
                a = fabs(avg[i, j, k])
                if a > sup:
                    sup = a
                if j > 0:
                    d = fabs(avg[i, j, k] - avg[i, j - 1, k])
                    if d > dmax:
                        dmax = d
    return sup, dmax


cdef inline double _minmod2(double a, double b) nogil:
    if a > 0 and b > 0:
        return a if a < b else b
    if a < 0 and b < 0:
        return a if a > b else b
    return 0.0


def cu_rhs_const(double[:, :, ::1] avg,
                 double[:, ::1] um0, double[:, ::1] up0,
                 double[:, ::1] umM, double[:, ::1] upM,
                 double[::1] lam, double ap, double am,
                 double[::1] source, double dx):
    """Semi-discrete central-upwind rhs with constant speeds."""
    cdef Py_ssize_t p = avg.shape[0]
    cdef Py_ssize_t Mc = avg.shape[1]
    cdef Py_ssize_t Kp = avg.shape[2]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] out_arr = np.empty((p, Mc, Kp))
    cdef double[:, :, ::1] out = out_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=2] s_arr = np.empty((Mc, Kp))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] F_arr = np.empty((Mc + 1, Kp))
    cdef double[:, ::1] s = s_arr
    cdef double[:, ::1] F = F_arr
    cdef Py_ssize_t i, j, k
    cdef double half = dx / 2
    cdef double half2 = 0.5 * dx
    cdef double inv = 1.0 / (ap - am)
    cdef double cterm = (ap * am) * inv
    cdef double li, src, um, up, fl, fr, t
    for i in range(p):
        li = lam[i]
        src = source[i]
        # limited slopes; boundary cells use one-sided point values
        for j in range(1, Mc - 1):
            for k in range(Kp):
                s[j, k] = _minmod2((avg[i, j, k] - avg[i, j - 1, k]) / dx,
                                   (avg[i, j + 1, k] - avg[i, j, k]) / dx)
        for k in range(Kp):
            s[0, k] = _minmod2((avg[i, 0, k] - um0[i, k]) / half,
                               (avg[i, 1, k] - avg[i, 0, k]) / dx)
            s[Mc - 1, k] = _minmod2((avg[i, Mc - 1, k] - avg[i, Mc - 2, k]) / dx,
                                    (upM[i, k] - avg[i, Mc - 1, k]) / half)
        # numerical fluxes at interfaces j = 0..Mc
        for j in range(Mc + 1):
            for k in range(Kp):
                if j == 0:
                    um = um0[i, k]
                    up = up0[i, k]
                elif j == Mc:
                    um = umM[i, k]
                    up = upM[i, k]
                else:
                    um = avg[i, j - 1, k] + half2 * s[j - 1, k]
                    up = avg[i, j, k] - half2 * s[j, k]
                fl = li * um
                fr = li * up
                F[j, k] = (ap * fl - am * fr) * inv + cterm * (up - um)
        for j in range(Mc):
            for k in range(Kp):
                t = F[j + 1, k] - F[j, k]
                if src != 0.0:
                    out[i, j, k] = -(t / dx) - src * avg[i, j, k]
                else:
                    out[i, j, k] = -(t / dx)
    return out_arr
