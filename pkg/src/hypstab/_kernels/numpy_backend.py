"""Pure-numpy kernels: reference implementation and import-time fallback.

Every arithmetic expression here is written with the exact same operation
order as the compiled core so that both backends produce bit-identical
results (the extension is compiled with FMA contraction disabled for the
same reason).  Signatures match ``_core`` one-for-one.

Speed-model encoding shared with the compiled core:
  kind 0 -> constant speeds, params = per-component values;
  kind 1 -> shallow-water speeds, params = (vbar, g, hbar, 1/(2*sqrt(g/hbar))).
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

MODEL_CONST = 0
MODEL_SW = 1


def _speed_fields(u0, u1, params):
    """(lam_plus, lam_minus) arrays for the shallow-water model."""
    vbar, g, hbar, inv2sq = params[0], params[1], params[2], params[3]
    dv = 0.5 * (u0 + u1)
    dh = (u0 - u1) * inv2sq
    c = np.sqrt(g * (hbar + dh))
    base = vbar + dv
    return base + c, base - c


def upwind_interior(u, out, m, dt, dx, source, model_kind, params):
    """One upwind sweep of the interior slots j = 1..M into ``out``.

    Boundary slots of ``out`` are left untouched; the caller closes them.
    """
    M = u.shape[1] - 2
    p = u.shape[0]
    dtdx = dt / dx
    if model_kind == MODEL_CONST:
        for i in range(p):
            coef = dtdx * params[i]
            cur = u[i, 1:M + 1]
            if i < m:
                upd = cur - coef * (cur - u[i, 0:M])
            else:
                upd = cur - coef * (u[i, 2:M + 2] - cur)
            if source[i] != 0.0:
                upd = upd - (dt * source[i]) * cur
            out[i, 1:M + 1] = upd
    else:
        if p != 2 or m != 1:
            raise ValueError("state-dependent speeds support p=2, m=1 only")
        lam_p, _ = _speed_fields(u[0, 1:M + 1], u[1, 1:M + 1], params)
        _, lam_m = _speed_fields(u[0, 2:M + 2], u[1, 2:M + 2], params)
        cur0 = u[0, 1:M + 1]
        upd0 = cur0 - (dtdx * lam_p) * (cur0 - u[0, 0:M])
        cur1 = u[1, 1:M + 1]
        upd1 = cur1 - (dtdx * lam_m) * (u[1, 2:M + 2] - cur1)
        if source[0] != 0.0:
            upd0 = upd0 - (dt * source[0]) * cur0
        if source[1] != 0.0:
            upd1 = upd1 - (dt * source[1]) * cur1
        out[0, 1:M + 1] = upd0
        out[1, 1:M + 1] = upd1


def lyap_lanes(u, W2, jlo, jhi):
    """Compensated per-(i, k) sums of (u^2 * w_ij) over j = jlo..jhi-1.

    Returns lane sums with the Neumaier correction folded in, shape (p, K+1).
    The sequential axis is j; the per-lane arithmetic is identical to a
    scalar Neumaier loop.
    """
    p, J, Kp = u.shape
    s = np.zeros((p, Kp))
    c = np.zeros((p, Kp))
    for i in range(p):
        si = s[i]
        ci = c[i]
        for j in range(jlo, jhi):
            row = u[i, j]
            x = (row * row) * W2[i, j]
            t = si + x
            big = np.abs(si) >= np.abs(x)
            ci += np.where(big, (si - t) + x, (x - t) + si)
            si[:] = t
    return s + c


def family_stats(u, m):
    """(sup |u|, max adjacent |difference|) over each family's meaningful slots."""
    M = u.shape[1] - 2
    sup = 0.0
    dmax = 0.0
    for i in range(u.shape[0]):
        lo, hi = (0, M) if i < m else (1, M + 1)
        window = u[i, lo:hi + 1]
        sup = max(sup, float(np.max(np.abs(window))))
        dmax = max(dmax, float(np.max(np.abs(window[1:] - window[:-1]))))
    return sup, dmax


def cell_stats(avg):
    """(sup |avg|, max adjacent |difference|) over a bare cell-average array."""
    sup = float(np.max(np.abs(avg)))
    dmax = float(np.max(np.abs(avg[:, 1:] - avg[:, :-1])))
    return sup, dmax


def _minmod2(a, b):
    return np.where((a > 0) & (b > 0), np.minimum(a, b),
                    np.where((a < 0) & (b < 0), np.maximum(a, b), 0.0))


def _cu_slopes(avg_i, bl, br, dx):
    Mc = avg_i.shape[0]
    s = np.empty_like(avg_i)
    d = (avg_i[1:] - avg_i[:-1]) / dx
    if Mc > 2:
        s[1:Mc - 1] = _minmod2(d[:-1], d[1:])
    half = dx / 2
    s[0] = _minmod2((avg_i[0] - bl) / half, d[0])
    s[Mc - 1] = _minmod2(d[Mc - 2], (br - avg_i[Mc - 1]) / half)
    return s


def _cu_interfaces(avg_i, s, um0, up0, umM, upM, dx):
    Mc = avg_i.shape[0]
    Kp = avg_i.shape[1]
    um = np.empty((Mc + 1, Kp))
    up = np.empty((Mc + 1, Kp))
    half2 = 0.5 * dx
    um[1:] = avg_i + half2 * s
    up[:Mc] = avg_i - half2 * s
    um[0] = um0
    up[0] = up0
    um[Mc] = umM
    up[Mc] = upM
    return um, up


def cu_rhs_const(avg, um0, up0, umM, upM, lam, ap, am, source, dx):
    """Semi-discrete central-upwind rhs with constant speeds and global a+/a-."""
    p = avg.shape[0]
    inv = 1.0 / (ap - am)
    cterm = (ap * am) * inv
    out = np.empty_like(avg)
    for i in range(p):
        s = _cu_slopes(avg[i], um0[i], upM[i], dx)
        um, up = _cu_interfaces(avg[i], s, um0[i], up0[i], umM[i], upM[i], dx)
        fl = lam[i] * um
        fr = lam[i] * up
        F = (ap * fl - am * fr) * inv + cterm * (up - um)
        if source[i] != 0.0:
            out[i] = -((F[1:] - F[:-1]) / dx) - source[i] * avg[i]
        else:
            out[i] = -((F[1:] - F[:-1]) / dx)
    return out


def cu_rhs_sw(avg, um0, up0, umM, upM, params, source, dx):
    """Semi-discrete central-upwind rhs with state-dependent shallow-water speeds.

    Local one-sided speeds are rebuilt per interface; stagnation interfaces
    (a+ = a- = 0) fall back to the left-state flux.
    """
    p = avg.shape[0]
    slopes = [None, None]
    for i in range(p):
        slopes[i] = _cu_slopes(avg[i], um0[i], upM[i], dx)
    iface = [
        _cu_interfaces(avg[i], slopes[i], um0[i], up0[i], umM[i], upM[i], dx)
        for i in range(p)
    ]
    um = np.stack([iface[0][0], iface[1][0]])
    up = np.stack([iface[0][1], iface[1][1]])
    lamm_p, lamm_m = _speed_fields(um[0], um[1], params)
    lamp_p, lamp_m = _speed_fields(up[0], up[1], params)
    ap = np.maximum(np.maximum(lamp_p, lamm_p), 0.0)
    am = np.minimum(np.minimum(lamp_m, lamm_m), 0.0)
    spread = ap - am
    degen = spread == 0.0
    inv = np.where(degen, 0.0, 1.0 / np.where(degen, 1.0, spread))
    cterm = (ap * am) * inv
    lam_at_m = (lamm_p, lamm_m)
    lam_at_p = (lamp_p, lamp_m)
    out = np.empty_like(avg)
    for i in range(p):
        fl = lam_at_m[i] * um[i]
        fr = lam_at_p[i] * up[i]
        F = (ap * fl - am * fr) * inv + cterm * (up[i] - um[i])
        F = np.where(degen, fl, F)
        if source[i] != 0.0:
            out[i] = -((F[1:] - F[:-1]) / dx) - source[i] * avg[i]
        else:
            out[i] = -((F[1:] - F[:-1]) / dx)
    return out
