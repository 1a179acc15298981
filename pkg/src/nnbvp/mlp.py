"""One-hidden-layer sigmoid network with closed-form input derivatives.

The network is ``N(x) = sum_i w2[i] * sigmoid(w1[i] . x + b1[i])`` (no output
bias).  Any mixed partial of N with respect to the inputs is again a network
of the same shape: the activation becomes the matching derivative of the
sigmoid and the output weights pick up a monomial in the hidden weights,

    d^lam N / dx_1^l1 ... dx_n^ln = sum_i w2[i] * prod_j w1[i, j]**l_j * sigmoid^(lam)(h_i)

with ``lam = l1 + ... + ln``.  Everything here evaluates that formula and
its gradient with respect to the parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ORDER = 3
_INTERNAL_MAX_ORDER = MAX_ORDER + 1


@dataclass(frozen=True)
class NetworkParams:
    """Weights of the network, also used as a gradient record of the same shape."""

    w1: np.ndarray  # (H, n)
    b1: np.ndarray  # (H,)
    w2: np.ndarray  # (H,)

    def __post_init__(self):
        w1 = np.array(self.w1, dtype=np.float64, ndmin=2)
        b1 = np.array(self.b1, dtype=np.float64).reshape(-1)
        w2 = np.array(self.w2, dtype=np.float64).reshape(-1)
        if w1.ndim != 2 or not (w1.shape[0] == b1.size == w2.size):
            raise ValueError(
                f"inconsistent shapes: w1 {w1.shape}, b1 {b1.shape}, w2 {w2.shape}"
            )
        if w1.shape[0] == 0 or w1.shape[1] == 0:
            raise ValueError("network needs at least one hidden node and one input")
        for name, arr in (("w1", w1), ("b1", b1), ("w2", w2)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "w2", w2)

    @property
    def h_count(self) -> int:
        return self.w1.shape[0]

    @property
    def input_dim(self) -> int:
        return self.w1.shape[1]

    @property
    def size(self) -> int:
        return self.h_count * (self.input_dim + 2)

    def to_vector(self) -> np.ndarray:
        """Flatten as ``[w1.ravel(), b1, w2]``."""
        return np.concatenate([self.w1.ravel(), self.b1, self.w2])

    @classmethod
    def from_vector(cls, vec, h_count: int, input_dim: int) -> "NetworkParams":
        vec = np.asarray(vec, dtype=np.float64)
        nw = h_count * input_dim
        if vec.shape != (nw + 2 * h_count,):
            raise ValueError(f"expected {nw + 2 * h_count} entries, got {vec.shape}")
        return cls(
            vec[:nw].reshape(h_count, input_dim),
            vec[nw : nw + h_count],
            vec[nw + h_count :],
        )

    def replace(self, **fields) -> "NetworkParams":
        values = {"w1": self.w1, "b1": self.b1, "w2": self.w2}
        values.update(fields)
        return NetworkParams(**values)


@dataclass(frozen=True)
class MultiIndex:
    """Per-input derivative orders ``(l1, ..., ln)``."""

    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(o) for o in self.orders)
        if any(o < 0 for o in orders):
            raise ValueError(f"negative derivative order in {orders}")
        if sum(orders) > MAX_ORDER:
            raise ValueError(f"total derivative order {sum(orders)} exceeds {MAX_ORDER}")
        object.__setattr__(self, "orders", orders)

    @property
    def total(self) -> int:
        return sum(self.orders)

    def __len__(self) -> int:
        return len(self.orders)


def as_multi_index(idx) -> MultiIndex:
    return idx if isinstance(idx, MultiIndex) else MultiIndex(tuple(idx))


def multi_indices(input_dim: int, max_total: int = MAX_ORDER) -> list[MultiIndex]:
    """All multi-indices of the given length with total order <= max_total."""
    out = [()]
    for _ in range(input_dim):
        out = [o + (k,) for o in out for k in range(max_total + 1)]
    return [MultiIndex(o) for o in out if sum(o) <= max_total]


def init_params(h_count: int, input_dim: int, seed: int) -> NetworkParams:
    """Uniform(-0.5, 0.5) initialization, deterministic in ``seed``."""
    if h_count < 1 or input_dim < 1:
        raise ValueError(f"h_count and input_dim must be >= 1, got {h_count}, {input_dim}")
    rng = np.random.default_rng(seed)
    w1 = rng.uniform(-0.5, 0.5, size=(h_count, input_dim))
    b1 = rng.uniform(-0.5, 0.5, size=h_count)
    w2 = rng.uniform(-0.5, 0.5, size=h_count)
    return NetworkParams(w1, b1, w2)


def sigmoid_table(z, max_order: int = _INTERNAL_MAX_ORDER) -> np.ndarray:
    """Stack of sigmoid derivatives of orders ``0..max_order`` along a new leading axis."""
    if not 0 <= max_order <= _INTERNAL_MAX_ORDER:
        raise ValueError(f"sigmoid derivatives are available up to order {_INTERNAL_MAX_ORDER}")
    z = np.asarray(z, dtype=np.float64)
    s = 0.5 * (1.0 + np.tanh(0.5 * z))
    d1 = s * (1.0 - s)
    table = [s, d1, d1 * (1.0 - 2.0 * s), d1 * (1.0 - 6.0 * s + 6.0 * s * s),
             d1 * (1.0 - 14.0 * s + 36.0 * s * s - 24.0 * s * s * s)]
    return np.stack(table[: max_order + 1])


def sigmoid_k(order: int, z):
    """``order``-th derivative of the logistic sigmoid, for order in 0..3."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
    out = sigmoid_table(z, order)[order]
    return float(out) if out.ndim == 0 else out


def _points(params: NetworkParams, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.ndim != 2 or x.shape[1] != params.input_dim:
        raise ValueError(
            f"point dimension {x.shape[-1]} does not match network input_dim {params.input_dim}"
        )
    return x, single


def _check_index(params: NetworkParams, idx) -> MultiIndex:
    idx = as_multi_index(idx)
    if len(idx) != params.input_dim:
        raise ValueError(f"multi-index {idx.orders} has wrong length for input_dim {params.input_dim}")
    return idx


def _monomials(w1: np.ndarray, orders) -> tuple[np.ndarray, np.ndarray]:
    """``prod_j w1[:, j]**l_j`` and its derivative with respect to each w1[:, k]."""
    orders = np.asarray(orders)
    mono = np.prod(w1 ** orders, axis=1)
    dmono = np.zeros_like(w1)
    for k, lk in enumerate(orders):
        if lk == 0:
            continue
        reduced = orders.copy()
        reduced[k] -= 1
        dmono[:, k] = lk * np.prod(w1 ** reduced, axis=1)
    return mono, dmono


def forward(params: NetworkParams, x):
    """Network output at one point ``(n,)`` or a batch ``(m, n)``."""
    return partial(params, x, (0,) * params.input_dim)


def partial(params: NetworkParams, x, idx):
    """Mixed partial ``d^idx N`` at one point or a batch of points."""
    idx = _check_index(params, idx)
    x, single = _points(params, x)
    h = x @ params.w1.T + params.b1
    sig = sigmoid_table(h, idx.total)[idx.total]
    mono, _ = _monomials(params.w1, idx.orders)
    out = sig @ (params.w2 * mono)
    return float(out[0]) if single else out


def param_gradient(params: NetworkParams, x, idx) -> NetworkParams:
    """Gradient of ``d^idx N(x)`` with respect to (w1, b1, w2) at a single point."""
    idx = _check_index(params, idx)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.input_dim,):
        raise ValueError(f"expected a single point of length {params.input_dim}, got {x.shape}")
    lam = idx.total
    h = params.w1 @ x + params.b1
    table = sigmoid_table(h, lam + 1)
    sig, sig_next = table[lam], table[lam + 1]
    mono, dmono = _monomials(params.w1, idx.orders)
    g_w2 = mono * sig
    g_b1 = params.w2 * mono * sig_next
    g_w1 = params.w2[:, None] * (dmono * sig[:, None] + np.outer(mono * sig_next, x))
    return NetworkParams(g_w1, g_b1, g_w2)

