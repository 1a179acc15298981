"""Error metrics of a trained trial solution against the analytic field."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mlp import NetworkParams
from .problems import analytic_solution, trial_eval
from .sampling import PointSet


@dataclass(frozen=True)
class ErrorField:
    points: np.ndarray = field(repr=False)
    e_abs: np.ndarray = field(repr=False)
    max_abs: float
    source: PointSet | None = field(default=None, repr=False)


def _as_points(points) -> tuple[np.ndarray, PointSet | None]:
    if isinstance(points, PointSet):
        return points.points, points
    return np.atleast_2d(np.asarray(points, dtype=np.float64)), None


def e_abs_field(problem, params: NetworkParams, points) -> ErrorField:
    """Pointwise ``|psi_a - psi_t|`` over a point set."""
    x, source = _as_points(points)
    if x.shape[0] == 0:
        raise ValueError("cannot evaluate errors on an empty point set")
    e = np.abs(analytic_solution(problem, x) - trial_eval(problem, params, x))
    return ErrorField(x, e, float(e.max()), source)


def relative_l2(reference: np.ndarray, approx: np.ndarray) -> float:
    """``||reference - approx|| / ||reference||``, deterministic for a given input order."""
    reference = np.asarray(reference, dtype=np.float64)
    denom = float(np.sum(reference * reference))
    if denom == 0.0:
        raise ValueError("relative error undefined: reference field is zero on every point")
    delta = reference - np.asarray(approx, dtype=np.float64)
    return float(np.sqrt(np.sum(delta * delta)) / np.sqrt(denom))


def e_norm(problem, params: NetworkParams, points) -> float:
    x, _ = _as_points(points)
    if x.shape[0] == 0:
        raise ValueError("cannot evaluate errors on an empty point set")
    return relative_l2(analytic_solution(problem, x), trial_eval(problem, params, x))
