"""The two shipped boundary value problems on the unit square.

Both trial solutions have the form ``psi_t = g(x) + (sum of factor * network
partials)``, built so the boundary conditions hold for any weights:

* laplace-dirichlet: ``lap psi = 0``, psi = 0 on x1=0, x1=1, x2=0 and
  psi = sin(pi x1) on x2=1.
  ``psi_t = x2 sin(pi x1) + x1(1-x1) x2(1-x2) N(x)``.
* poisson-mixed: ``lap psi = (2 - pi^2 x2^2) sin(pi x1)``, psi = 0 on x1=0,
  x1=1, x2=0 and d psi/dx2 = 2 sin(pi x1) on x2=1.
  ``psi_t = 2 x2 sin(pi x1) + x1(1-x1) x2 [N(x1, x2) - N(x1, 1) - N_x2(x1, 1)]``.

Derivatives of psi_t are written out with the product rule as affine
combinations of network partials (see :class:`nnbvp.kernels.Expansion`).
"""

from __future__ import annotations

import enum

import numpy as np

from . import kernels
from .kernels import Expansion
from .mlp import NetworkParams

PI = np.pi


class Problem(str, enum.Enum):
    LAPLACE_DIRICHLET = "laplace-dirichlet"
    POISSON_MIXED = "poisson-mixed"

    @property
    def input_dim(self) -> int:
        return 2


QUANTITIES = ("value", "d_x1", "d_x2", "laplacian", "residual")

# (orders, site) of every network partial a quantity may touch.
# site 0 is the point itself, site 1 its projection (x1, 1) onto the top edge.
_LAPLACE_TERMS = ([(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)], [0, 0, 0, 0, 0])
_POISSON_TERMS = (
    [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)],
    [0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1],
)


def as_problem(problem) -> Problem:
    try:
        return Problem(problem)
    except ValueError:
        names = ", ".join(p.value for p in Problem)
        raise ValueError(f"unknown problem {problem!r}; choose one of {names}") from None


def domain_points(x) -> tuple[np.ndarray, bool]:
    """Validate points in the closed unit square; returns ``(points (m, 2), was_single)``."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.ndim != 2 or x.shape[1] != 2:
        raise ValueError(f"expected 2-D points, got array of shape {x.shape}")
    if not np.all((x >= 0.0) & (x <= 1.0)):
        raise ValueError("points must lie in the closed unit square [0, 1] x [0, 1]")
    return x, single


def _unwrap(values, single):
    return float(values[0]) if single else values


def analytic_solution(problem, x):
    problem = as_problem(problem)
    x, single = domain_points(x)
    x1, x2 = x[:, 0], x[:, 1]
    if problem is Problem.LAPLACE_DIRICHLET:
        out = np.sin(PI * x1) * np.sinh(PI * x2) / np.sinh(PI)
    else:
        out = x2**2 * np.sin(PI * x1)
    return _unwrap(out, single)


def source_term(problem, x):
    problem = as_problem(problem)
    x, single = domain_points(x)
    if problem is Problem.LAPLACE_DIRICHLET:
        out = np.zeros(x.shape[0])
    else:
        out = (2.0 - PI**2 * x[:, 1] ** 2) * np.sin(PI * x[:, 0])
    return _unwrap(out, single)


def _laplace_coefficients(x, quantity):
    x1, x2 = x[:, 0], x[:, 1]
    s, c = np.sin(PI * x1), np.cos(PI * x1)
    a, b = x1 * (1 - x1), x2 * (1 - x2)
    da, db = 1 - 2 * x1, 1 - 2 * x2
    zero = np.zeros_like(x1)
    if quantity == "value":
        return x2 * s, [a * b, zero, zero, zero, zero]
    if quantity == "d_x1":
        return PI * x2 * c, [da * b, a * b, zero, zero, zero]
    if quantity == "d_x2":
        return s, [a * db, zero, a * b, zero, zero]
    # laplacian of a*b*N = ab lap N + 2 grad(ab).grad N + N lap(ab)
    return -(PI**2) * x2 * s, [-2 * (a + b), 2 * da * b, 2 * a * db, a * b, a * b]


def _poisson_coefficients(x, quantity):
    x1, x2 = x[:, 0], x[:, 1]
    s, c = np.sin(PI * x1), np.cos(PI * x1)
    a, da = x1 * (1 - x1), 1 - 2 * x1
    ax2, dax2 = a * x2, da * x2
    zero = np.zeros_like(x1)
    # M = N - N(x1,1) - N_x2(x1,1); psi_t = 2 x2 s + a x2 M
    if quantity == "value":
        return 2 * x2 * s, [ax2, zero, zero, zero, zero,
                            -ax2, -ax2, zero, zero, zero, zero]
    if quantity == "d_x1":
        return 2 * PI * x2 * c, [dax2, ax2, zero, zero, zero,
                                 -dax2, -dax2, -ax2, -ax2, zero, zero]
    if quantity == "d_x2":
        return 2 * s, [a, zero, ax2, zero, zero,
                       -a, -a, zero, zero, zero, zero]
    # -2 x2 M + 2 a' x2 M_x1 + a x2 M_x1x1 + 2 a N_x2 + a x2 N_x2x2
    return -2 * PI**2 * x2 * s, [-2 * x2, 2 * dax2, 2 * a, ax2, ax2,
                                 2 * x2, 2 * x2, -2 * dax2, -2 * dax2, -ax2, -ax2]


def expansion(problem, x, quantity: str = "residual") -> Expansion:
    """Affine expansion in network partials of one trial-solution quantity over points ``x``."""
    problem = as_problem(problem)
    x, _ = domain_points(x)
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}, got {quantity!r}")
    base = "laplacian" if quantity == "residual" else quantity
    if problem is Problem.LAPLACE_DIRICHLET:
        orders, site = _LAPLACE_TERMS
        offset, coef = _laplace_coefficients(x, base)
        points = x[:, None, :]
    else:
        orders, site = _POISSON_TERMS
        offset, coef = _poisson_coefficients(x, base)
        top = np.column_stack([x[:, 0], np.ones(x.shape[0])])
        points = np.stack([x, top], axis=1)
    if quantity == "residual":
        offset = offset - source_term(problem, x)
    return Expansion(
        offset=np.ascontiguousarray(offset, dtype=np.float64),
        coef=np.ascontiguousarray(np.column_stack(coef), dtype=np.float64),
        points=np.ascontiguousarray(points, dtype=np.float64),
        orders=np.asarray(orders, dtype=np.int64),
        site=np.asarray(site, dtype=np.int64),
    )


def _check_params(problem: Problem, params: NetworkParams):
    if params.input_dim != problem.input_dim:
        raise ValueError(
            f"{problem.value} needs a network with input_dim {problem.input_dim}, "
            f"got {params.input_dim}"
        )


def _quantity(problem, params, x, quantity):
    problem = as_problem(problem)
    _check_params(problem, params)
    x, single = domain_points(x)
    return _unwrap(kernels.evaluate(params, expansion(problem, x, quantity)), single)


def trial_eval(problem, params: NetworkParams, x):
    """Trial solution value at one point or a batch."""
    return _quantity(problem, params, x, "value")


def trial_gradient_and_laplacian(problem, params: NetworkParams, x):
    """``(grad, laplacian)`` of the trial solution; grad is ``(2,)`` or ``(m, 2)``."""
    g1 = _quantity(problem, params, x, "d_x1")
    g2 = _quantity(problem, params, x, "d_x2")
    lap = _quantity(problem, params, x, "laplacian")
    if np.ndim(g1) == 0:
        return np.array([g1, g2]), lap
    return np.column_stack([g1, g2]), lap


def residual(problem, params: NetworkParams, x):
    """PDE residual ``lap psi_t - f`` at one point or a batch."""
    return _quantity(problem, params, x, "residual")


def residual_param_gradient(problem, params: NetworkParams, x) -> NetworkParams:
    """Gradient of the residual at a single point with respect to every parameter."""
    problem = as_problem(problem)
    _check_params(problem, params)
    x, single = domain_points(x)
    if not single:
        raise ValueError("residual_param_gradient takes a single point")
    flat = kernels.weighted_gradient(params, expansion(problem, x, "residual"), np.ones(1))
    return NetworkParams.from_vector(flat, params.h_count, params.input_dim)
