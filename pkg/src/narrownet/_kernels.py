"""Compiled per-run kernels for the training loop.

Arrays carry a leading run axis. Every kernel treats each run on its own (no
cross-run reductions), so a run's arithmetic is the same whatever else shares
the batch. Matrix products and the activation itself stay in numpy, whose
vectorised transcendental functions are much faster than scalar ones here.
"""

from __future__ import annotations

import math

import numba
import numpy as np

# same relative slack as constraints.REL_SLACK
BALL_SLACK = 1e-12

ACT_TANH, ACT_SIGMOID, ACT_SOFTPLUS = 0, 1, 2
ACT_CODES = {"tanh": ACT_TANH, "sigmoid": ACT_SIGMOID, "softplus": ACT_SOFTPLUS}

_jit = numba.njit(cache=True, fastmath=False, nogil=True)


@_jit
def _dact(z, a, code):
    if code == ACT_TANH:
        return 1.0 - a * a
    if code == ACT_SIGMOID:
        return a * (1.0 - a)
    return 0.5 * (1.0 + math.tanh(0.5 * z))


@_jit
def backprop(z, a, v, y, code, paired, loss, gv):
    """Loss and outer gradient from hidden activations ``a = act(z)``.

    Overwrites ``z`` with ``r_i * c_j * act'(z_ij)`` so the hidden gradient
    is ``x^T z`` afterwards.
    """
    k, n, m = z.shape
    h = m // 2
    for i in range(k):
        acc = 0.0
        for p in range(gv.shape[1]):
            gv[i, p] = 0.0
        for r in range(n):
            f = 0.0
            if paired:
                for j in range(h):
                    f += v[i, j] * (a[i, r, j] - a[i, r, j + h])
            else:
                for j in range(m):
                    f += v[i, j] * a[i, r, j]
            res = f - y[r]
            acc += res * res
            if paired:
                for j in range(h):
                    a1 = a[i, r, j]
                    a2 = a[i, r, j + h]
                    gv[i, j] += (a1 - a2) * res
                    z[i, r, j] = res * v[i, j] * _dact(z[i, r, j], a1, code)
                    z[i, r, j + h] = -res * v[i, j] * _dact(z[i, r, j + h], a2, code)
            else:
                for j in range(m):
                    a1 = a[i, r, j]
                    gv[i, j] += a1 * res
                    z[i, r, j] = res * v[i, j] * _dact(z[i, r, j], a1, code)
        loss[i] = 0.5 * acc


@_jit
def _ball_scale(w, w0, eps):
    """Scale factor putting ``w`` on the ball around ``w0`` (1.0 if inside)."""
    ss = 0.0
    for a in range(w.shape[0]):
        for b in range(w.shape[1]):
            dlt = w[a, b] - w0[a, b]
            ss += dlt * dlt
    dist = math.sqrt(ss)
    if dist > eps * (1.0 + BALL_SLACK):
        return eps / dist
    return 1.0


@_jit
def _clamp_v(v, zeta, kappa):
    """In-place floor/ratio clamp; returns (floor_hit, ratio_hit)."""
    floor_hit = False
    vmin = math.inf
    for j in range(v.shape[0]):
        if v[j] < zeta:
            v[j] = zeta
            floor_hit = True
        if v[j] < vmin:
            vmin = v[j]
    cap = kappa * vmin
    ratio_hit = False
    for j in range(v.shape[0]):
        if v[j] > cap:
            v[j] = cap
            ratio_hit = True
    return floor_hit, ratio_hit


@_jit
def mapping_norm(w, v, gw, gv, lr, mode, w0, eps, zeta, kappa, out):
    """Gradient-mapping norm at probe step ``lr[i]``.

    mode 0: no projection (plain gradient norm); 1: ball on w only;
    2: ball on w and clamp on v.
    """
    d, m = w.shape[1], w.shape[2]
    nv = v.shape[1]
    tw = np.empty((d, m))
    tv = np.empty(nv)
    for i in range(w.shape[0]):
        if mode == 0:
            ss = 0.0
            for a in range(d):
                for b in range(m):
                    ss += gw[i, a, b] * gw[i, a, b]
            for j in range(nv):
                ss += gv[i, j] * gv[i, j]
            out[i] = math.sqrt(ss)
            continue
        step = lr[i]
        for a in range(d):
            for b in range(m):
                tw[a, b] = w[i, a, b] - step * gw[i, a, b]
        sc = _ball_scale(tw, w0, eps)
        ss = 0.0
        for a in range(d):
            for b in range(m):
                p = tw[a, b]
                if sc != 1.0:
                    p = w0[a, b] + sc * (tw[a, b] - w0[a, b])
                dlt = w[i, a, b] - p
                ss += dlt * dlt
        for j in range(nv):
            tv[j] = v[i, j] - step * gv[i, j]
        if mode == 2:
            _clamp_v(tv, zeta, kappa)
        for j in range(nv):
            dlt = v[i, j] - tv[j]
            ss += dlt * dlt
        out[i] = math.sqrt(ss) / step


@_jit
def update(w, v, bw, bv, gw, gv, lr_w, lr_v, mom, mode, w0, eps, zeta, kappa, w_hits, floor_hits, ratio_hits):
    """Momentum step, then clamp v (mode 2) and project w (modes 1, 2)."""
    d, m = w.shape[1], w.shape[2]
    nv = v.shape[1]
    for i in range(w.shape[0]):
        for a in range(d):
            for b in range(m):
                bw[i, a, b] = mom * bw[i, a, b] + gw[i, a, b]
                w[i, a, b] = w[i, a, b] - lr_w[i] * bw[i, a, b]
        for j in range(nv):
            bv[i, j] = mom * bv[i, j] + gv[i, j]
            v[i, j] = v[i, j] - lr_v[i] * bv[i, j]
        if mode == 2:
            fh, rh = _clamp_v(v[i], zeta, kappa)
            if fh:
                floor_hits[i] += 1
            if rh:
                ratio_hits[i] += 1
        if mode >= 1:
            sc = _ball_scale(w[i], w0, eps)
            if sc != 1.0:
                w_hits[i] += 1
                for a in range(d):
                    for b in range(m):
                        w[i, a, b] = w0[a, b] + sc * (w[i, a, b] - w0[a, b])


@_jit
def clamp_all(v, zeta, kappa):
    for i in range(v.shape[0]):
        _clamp_v(v[i], zeta, kappa)
