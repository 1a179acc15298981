"""Hot kernels over linear combinations of network derivatives.

Every quantity the solver needs (trial values, their first derivatives, the
Laplacian, the PDE residual) is an affine combination of network partials,
evaluated either at the collocation point itself or at a related point such
as its projection onto an edge.  :class:`Expansion` stores that combination
for a batch of rows; the kernels evaluate it, its parameter gradient, and run
SGD epochs over it.

Two interchangeable backends exist: loop kernels compiled with numba and a
vectorized numpy path.  ``NNBVP_BACKEND=numpy`` (or an unavailable numba)
selects the numpy path at import time.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from types import ModuleType

import numpy as np

from . import _numpy

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba missing from the environment
    _numba = None

BACKENDS: dict[str, ModuleType] = {"numpy": _numpy}
if _numba is not None:
    BACKENDS["numba"] = _numba


def _select() -> str:
    requested = os.environ.get("NNBVP_BACKEND", "numba").strip().lower()
    if requested not in ("numba", "numpy"):
        raise ValueError(f"NNBVP_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numba" and _numba is None:  # pragma: no cover
        warnings.warn("numba is not importable, falling back to numpy kernels")
        return "numpy"
    return requested


BACKEND = _select()


def get_backend(name: str | None = None) -> ModuleType:
    return BACKENDS[name or BACKEND]


@dataclass(frozen=True)
class Expansion:
    """``offset[r] + sum_t coef[r, t] * D^orders[t] N(points[r, site[t]])`` for each row r."""

    offset: np.ndarray  # (m,)
    coef: np.ndarray  # (m, T)
    points: np.ndarray  # (m, P, n)
    orders: np.ndarray  # (T, n) int64
    site: np.ndarray  # (T,) int64

    def __len__(self) -> int:
        return self.offset.shape[0]

    def take(self, rows) -> "Expansion":
        return Expansion(self.offset[rows], self.coef[rows], self.points[rows],
                         self.orders, self.site)


def _arrays(params):
    return params.w1, params.b1, params.w2


def evaluate(params, exp: Expansion, backend: str | None = None) -> np.ndarray:
    kern = get_backend(backend)
    return kern.values(*_arrays(params), exp.offset, exp.coef, exp.points, exp.orders, exp.site)


def weighted_gradient(params, exp: Expansion, weights, backend: str | None = None) -> np.ndarray:
    """Flat gradient of ``sum_r weights[r] * row_r`` with respect to the parameters."""
    kern = get_backend(backend)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    return kern.weighted_grad(*_arrays(params), exp.coef, exp.points, exp.orders, exp.site,
                              weights)


def sgd_epoch(w1, b1, w2, exp: Expansion, perm, batch_size: int, lr: float, l2: float,
              backend: str | None = None) -> None:
    """One pass of minibatch SGD on ``mean(row**2) + l2 * |weights|**2``; updates in place."""
    kern = get_backend(backend)
    kern.sgd_epoch(w1, b1, w2, exp.offset, exp.coef, exp.points, exp.orders, exp.site,
                   np.ascontiguousarray(perm, dtype=np.int64), int(batch_size), float(lr),
                   float(l2))
