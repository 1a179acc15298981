"""Mesh-free neural-network solver for second-order BVPs on the unit square."""

from .kernels import BACKEND
from .mlp import MultiIndex, NetworkParams, forward, init_params, param_gradient, partial, sigmoid_k
from .problems import (
    Problem,
    analytic_solution,
    residual,
    residual_param_gradient,
    source_term,
    trial_eval,
    trial_gradient_and_laplacian,
)
from .sampling import GridKind, GridSpec, PointSet, generate, test_grid
from .evaluation import ErrorField, e_abs_field, e_norm
from .trainer import (
    ConvergenceRecord,
    TrainConfig,
    TrainingDiverged,
    TrainResult,
    cost_gradient,
    total_cost,
    train,
)

__version__ = "0.1.0"
