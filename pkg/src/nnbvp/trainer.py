"""Minibatch SGD on the mean squared PDE residual.

The learning rate decays exponentially per epoch (``lr0 * anneal**epoch``)
and an L2 penalty is applied to the weights (w1, w2), not to the biases.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .evaluation import relative_l2
from .mlp import NetworkParams, init_params
from .problems import analytic_solution, as_problem, expansion
from .sampling import GridSpec, PointSet, generate, test_grid

log = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, what: str):
        super().__init__(f"non-finite {what} detected at epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20000
    lr0: float = 0.05
    anneal: float = 0.9995
    l2: float = 1e-6
    batch_size: int = 32
    seed: int = 0
    eval_every: int = 100

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not self.lr0 > 0:
            raise ValueError("lr0 must be positive")
        if not 0 < self.anneal <= 1:
            raise ValueError("anneal must be in (0, 1]")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        if self.batch_size < 1 or self.eval_every < 1:
            raise ValueError("batch_size and eval_every must be positive")

    def learning_rate(self, epoch: int) -> float:
        return self.lr0 * self.anneal**epoch

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ConvergenceRecord:
    epoch: int
    pde_error_train: float
    e_norm_train: float
    e_norm_test: float


@dataclass(frozen=True)
class TrainResult:
    params: NetworkParams
    history: list[ConvergenceRecord] = field(repr=False)
    config: TrainConfig
    grid: GridSpec


def _point_array(points) -> np.ndarray:
    x = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=np.float64)
    x = np.atleast_2d(x)
    if x.shape[0] == 0:
        raise ValueError("empty point set")
    return x


def _weight_norm(params: NetworkParams) -> float:
    return float(np.sum(params.w1**2) + np.sum(params.w2**2))


def total_cost(problem, params: NetworkParams, points, l2: float = 0.0) -> float:
    """``mean(residual**2) + l2 * (|w1|**2 + |w2|**2)``."""
    x = _point_array(points)
    r = kernels.evaluate(params, expansion(problem, x, "residual"))
    return float(np.mean(r * r)) + l2 * _weight_norm(params)


def cost_gradient(problem, params: NetworkParams, batch, l2: float = 0.0) -> NetworkParams:
    """Gradient of :func:`total_cost` over ``batch`` with respect to every parameter."""
    x = _point_array(batch)
    exp = expansion(problem, x, "residual")
    r = kernels.evaluate(params, exp)
    flat = kernels.weighted_gradient(params, exp, 2.0 * r / x.shape[0])
    g = NetworkParams.from_vector(flat, params.h_count, params.input_dim)
    return g.replace(w1=g.w1 + 2.0 * l2 * params.w1, w2=g.w2 + 2.0 * l2 * params.w2)


class _Monitor:
    """Precomputed expansions for the convergence snapshots."""

    def __init__(self, problem, train_x: np.ndarray, test_x: np.ndarray):
        self.residual = expansion(problem, train_x, "residual")
        self.train_value = expansion(problem, train_x, "value")
        self.test_value = expansion(problem, test_x, "value")
        self.train_ref = analytic_solution(problem, train_x)
        self.test_ref = analytic_solution(problem, test_x)

    def record(self, epoch: int, params: NetworkParams, backend) -> ConvergenceRecord:
        r = kernels.evaluate(params, self.residual, backend)
        pde = float(np.mean(r * r))
        if not np.isfinite(pde):
            raise TrainingDiverged(epoch, "PDE error")
        return ConvergenceRecord(
            epoch=epoch,
            pde_error_train=pde,
            e_norm_train=relative_l2(self.train_ref,
                                     kernels.evaluate(params, self.train_value, backend)),
            e_norm_test=relative_l2(self.test_ref,
                                    kernels.evaluate(params, self.test_value, backend)),
        )


def train(problem, grid: GridSpec, h_count: int, config: TrainConfig | None = None,
          *, test_points: PointSet | None = None, backend: str | None = None) -> TrainResult:
    """Fit the trial solution of ``problem`` on the points generated from ``grid``."""
    problem = as_problem(problem)
    config = config or TrainConfig()
    train_x = generate(grid).points
    test_x = (test_points or test_grid()).points
    monitor = _Monitor(problem, train_x, test_x)
    exp = expansion(problem, train_x, "residual")

    start = init_params(h_count, problem.input_dim, config.seed)
    w1, b1, w2 = start.w1.copy(), start.b1.copy(), start.w2.copy()
    shuffle = np.random.default_rng([config.seed, len(train_x)])
    history = [monitor.record(0, start, backend)]

    for epoch in range(1, config.epochs + 1):
        perm = shuffle.permutation(len(train_x))
        kernels.sgd_epoch(w1, b1, w2, exp, perm, config.batch_size,
                          config.learning_rate(epoch - 1), config.l2, backend)
        if not (np.isfinite(w1).all() and np.isfinite(b1).all() and np.isfinite(w2).all()):
            raise TrainingDiverged(epoch, "parameters")
        if epoch % config.eval_every == 0 or epoch == config.epochs:
            history.append(monitor.record(epoch, NetworkParams(w1, b1, w2), backend))
            log.debug("epoch %d: %s", epoch, history[-1])

    return TrainResult(NetworkParams(w1, b1, w2), history, config, grid)
