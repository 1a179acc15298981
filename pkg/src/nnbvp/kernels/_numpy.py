"""Vectorized numpy kernels (fallback path, no compilation)."""

import numpy as np


def _sigmoid_table(z):
    s = 0.5 * (1.0 + np.tanh(0.5 * z))
    d1 = s * (1.0 - s)
    s2 = s * s
    return np.stack([s, d1, d1 * (1.0 - 2.0 * s), d1 * (1.0 - 6.0 * s + 6.0 * s2),
                     d1 * (1.0 - 14.0 * s + 36.0 * s2 - 24.0 * s2 * s)])


def _monomials(w1, orders):
    T, n = orders.shape
    mono = np.ones((T, w1.shape[0]))
    dmono = np.zeros((T,) + w1.shape)
    for t in range(T):
        mono[t] = np.prod(w1 ** orders[t], axis=1)
        for k in range(n):
            lk = orders[t, k]
            if lk:
                reduced = orders[t].copy()
                reduced[k] -= 1
                dmono[t, :, k] = lk * np.prod(w1 ** reduced, axis=1)
    return mono, dmono


def _hidden(w1, b1, points):
    # (5, m, P, H)
    return _sigmoid_table(np.einsum("mpn,hn->mph", points, w1) + b1)


def _values(w1, w2, offset, coef, orders, site, sig):
    mono, _ = _monomials(w1, orders)
    lam = orders.sum(axis=1)
    out = offset.copy()
    for t in range(orders.shape[0]):
        out += coef[:, t] * (sig[lam[t], :, site[t], :] @ (w2 * mono[t]))
    return out


def values(w1, b1, w2, offset, coef, points, orders, site):
    return _values(w1, w2, offset, coef, orders, site, _hidden(w1, b1, points))


def _weighted_grad(w1, w2, coef, points, orders, site, weights, sig):
    mono, dmono = _monomials(w1, orders)
    lam = orders.sum(axis=1)
    g_w1 = np.zeros_like(w1)
    g_b1 = np.zeros_like(w2)
    g_w2 = np.zeros_like(w2)
    for t in range(orders.shape[0]):
        a = weights * coef[:, t]
        s0 = sig[lam[t], :, site[t], :]
        s1 = sig[lam[t] + 1, :, site[t], :]
        as0 = a @ s0
        as1 = a @ s1
        g_w2 += mono[t] * as0
        g_b1 += w2 * mono[t] * as1
        # sum_m a_m * s1[m, i] * x[m, k]
        as1x = np.einsum("m,mh,mn->hn", a, s1, points[:, site[t], :])
        g_w1 += w2[:, None] * (dmono[t] * as0[:, None] + mono[t][:, None] * as1x)
    return np.concatenate([g_w1.ravel(), g_b1, g_w2])


def weighted_grad(w1, b1, w2, coef, points, orders, site, weights):
    sig = _hidden(w1, b1, points)
    return _weighted_grad(w1, w2, coef, points, orders, site, weights, sig)


def sgd_epoch(w1, b1, w2, offset, coef, points, orders, site, perm, batch_size, lr, l2):
    H, n = w1.shape
    nw = H * n
    for start in range(0, perm.shape[0], batch_size):
        rows = perm[start : start + batch_size]
        pts = points[rows]
        c = coef[rows]
        sig = _hidden(w1, b1, pts)
        r = _values(w1, w2, offset[rows], c, orders, site, sig)
        g = _weighted_grad(w1, w2, c, pts, orders, site, 2.0 * r / rows.shape[0], sig)
        w1 -= lr * (g[:nw].reshape(H, n) + 2.0 * l2 * w1)
        b1 -= lr * g[nw : nw + H]
        w2 -= lr * (g[nw + H :] + 2.0 * l2 * w2)
