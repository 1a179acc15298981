"""Loop-form kernels compiled with numba; same signatures as the numpy path."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _sigmoid_row(z, out):
    s = 0.5 * (1.0 + math.tanh(0.5 * z))
    d1 = s * (1.0 - s)
    s2 = s * s
    out[0] = s
    out[1] = d1
    out[2] = d1 * (1.0 - 2.0 * s)
    out[3] = d1 * (1.0 - 6.0 * s + 6.0 * s2)
    out[4] = d1 * (1.0 - 14.0 * s + 36.0 * s2 - 24.0 * s2 * s)


@njit(cache=True)
def _monomials(w1, orders):
    T, n = orders.shape
    H = w1.shape[0]
    mono = np.ones((T, H))
    dmono = np.zeros((T, H, n))
    for t in range(T):
        for i in range(H):
            p = 1.0
            for j in range(n):
                for _ in range(orders[t, j]):
                    p *= w1[i, j]
            mono[t, i] = p
            for k in range(n):
                lk = orders[t, k]
                if lk == 0:
                    continue
                d = float(lk)
                for j in range(n):
                    e = orders[t, j] - 1 if j == k else orders[t, j]
                    for _ in range(e):
                        d *= w1[i, j]
                dmono[t, i, k] = d
    return mono, dmono


@njit(cache=True)
def _hidden_row(w1, b1, points, r, sig):
    # sig: (P, H, 5) scratch for one row
    H, n = w1.shape
    for p in range(points.shape[1]):
        for i in range(H):
            z = b1[i]
            for j in range(n):
                z += w1[i, j] * points[r, p, j]
            _sigmoid_row(z, sig[p, i])


@njit(cache=True)
def _row_value(w2, offset_r, coef, orders, site, mono, lam, r, sig):
    acc = offset_r
    H = w2.shape[0]
    for t in range(orders.shape[0]):
        c = coef[r, t]
        if c == 0.0:
            continue
        s = 0.0
        for i in range(H):
            s += w2[i] * mono[t, i] * sig[site[t], i, lam[t]]
        acc += c * s
    return acc


@njit(cache=True)
def _row_grad(w2, coef, points, orders, site, mono, dmono, lam, r, weight, sig,
              g_w1, g_b1, g_w2):
    H = w2.shape[0]
    n = orders.shape[1]
    for t in range(orders.shape[0]):
        a = weight * coef[r, t]
        if a == 0.0:
            continue
        p = site[t]
        for i in range(H):
            s0 = sig[p, i, lam[t]]
            s1 = sig[p, i, lam[t] + 1]
            g_w2[i] += a * mono[t, i] * s0
            aw = a * w2[i]
            g_b1[i] += aw * mono[t, i] * s1
            for k in range(n):
                g_w1[i, k] += aw * (dmono[t, i, k] * s0 + mono[t, i] * s1 * points[r, p, k])


@njit(cache=True)
def _orders_total(orders):
    lam = np.zeros(orders.shape[0], dtype=np.int64)
    for t in range(orders.shape[0]):
        for j in range(orders.shape[1]):
            lam[t] += orders[t, j]
    return lam


@njit(cache=True)
def values(w1, b1, w2, offset, coef, points, orders, site):
    H = w1.shape[0]
    m = coef.shape[0]
    mono, _ = _monomials(w1, orders)
    lam = _orders_total(orders)
    sig = np.empty((points.shape[1], H, 5))
    out = np.empty(m)
    for r in range(m):
        _hidden_row(w1, b1, points, r, sig)
        out[r] = _row_value(w2, offset[r], coef, orders, site, mono, lam, r, sig)
    return out


@njit(cache=True)
def weighted_grad(w1, b1, w2, coef, points, orders, site, weights):
    H, n = w1.shape
    mono, dmono = _monomials(w1, orders)
    lam = _orders_total(orders)
    sig = np.empty((points.shape[1], H, 5))
    g_w1 = np.zeros((H, n))
    g_b1 = np.zeros(H)
    g_w2 = np.zeros(H)
    for r in range(coef.shape[0]):
        _hidden_row(w1, b1, points, r, sig)
        _row_grad(w2, coef, points, orders, site, mono, dmono, lam, r, weights[r], sig,
                  g_w1, g_b1, g_w2)
    out = np.empty(H * n + 2 * H)
    out[: H * n] = g_w1.ravel()
    out[H * n : H * n + H] = g_b1
    out[H * n + H :] = g_w2
    return out


@njit(cache=True)
def sgd_epoch(w1, b1, w2, offset, coef, points, orders, site, perm, batch_size, lr, l2):
    H, n = w1.shape
    lam = _orders_total(orders)
    sig = np.empty((points.shape[1], H, 5))
    g_w1 = np.empty((H, n))
    g_b1 = np.empty(H)
    g_w2 = np.empty(H)
    m = perm.shape[0]
    for start in range(0, m, batch_size):
        stop = min(start + batch_size, m)
        scale = 2.0 / (stop - start)
        mono, dmono = _monomials(w1, orders)
        g_w1[:] = 0.0
        g_b1[:] = 0.0
        g_w2[:] = 0.0
        for q in range(start, stop):
            r = perm[q]
            _hidden_row(w1, b1, points, r, sig)
            res = _row_value(w2, offset[r], coef, orders, site, mono, lam, r, sig)
            _row_grad(w2, coef, points, orders, site, mono, dmono, lam, r, scale * res, sig,
                      g_w1, g_b1, g_w2)
        for i in range(H):
            for k in range(n):
                w1[i, k] -= lr * (g_w1[i, k] + 2.0 * l2 * w1[i, k])
            b1[i] -= lr * g_b1[i]
            w2[i] -= lr * (g_w2[i] + 2.0 * l2 * w2[i])
