import os
import subprocess
import sys

import numpy as np
import pytest

from nnbvp import kernels
from nnbvp.mlp import init_params, partial
from nnbvp.problems import Problem, expansion
from nnbvp.sampling import GridSpec, generate

BACKENDS = sorted(kernels.BACKENDS)


@pytest.fixture(params=list(Problem), ids=lambda p: p.value)
def problem(request):
    return request.param


@pytest.fixture
def batch():
    return generate(GridSpec("random", 6, seed=2)).points


def test_both_backends_available():
    assert BACKENDS == ["numba", "numpy"]


def test_single_term_is_partial():
    p = init_params(9, 2, 0)
    x = np.random.default_rng(0).uniform(0, 1, (12, 2))
    for orders in [(0, 0), (1, 0), (1, 1), (2, 1), (0, 3)]:
        exp = kernels.Expansion(np.zeros(12), np.ones((12, 1)), x[:, None, :],
                                np.array([orders]), np.array([0]))
        for name in BACKENDS:
            np.testing.assert_allclose(kernels.evaluate(p, exp, name), partial(p, x, orders),
                                       rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("quantity", ["value", "d_x1", "d_x2", "laplacian", "residual"])
def test_backends_agree_on_values(problem, batch, quantity):
    p = init_params(15, 2, 4)
    exp = expansion(problem, batch, quantity)
    a, b = (kernels.evaluate(p, exp, name) for name in BACKENDS)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_backends_agree_on_gradient(problem, batch):
    p = init_params(15, 2, 4)
    exp = expansion(problem, batch, "residual")
    w = np.random.default_rng(1).normal(size=len(exp))
    a, b = (kernels.weighted_gradient(p, exp, w, name) for name in BACKENDS)
    np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-12)


def test_backends_agree_on_sgd_epoch(problem, batch):
    exp = expansion(problem, batch, "residual")
    perm = np.random.default_rng(3).permutation(len(exp))
    out = []
    for name in BACKENDS:
        p = init_params(15, 2, 4)
        w1, b1, w2 = p.w1.copy(), p.b1.copy(), p.w2.copy()
        for _ in range(5):
            kernels.sgd_epoch(w1, b1, w2, exp, perm, 7, 0.01, 1e-4, name)
        out.append(np.concatenate([w1.ravel(), b1, w2]))
    np.testing.assert_allclose(out[0], out[1], rtol=1e-10, atol=1e-12)


def test_sgd_epoch_full_batch_is_gradient_step(problem, batch):
    p = init_params(15, 2, 8)
    exp = expansion(problem, batch, "residual")
    r = kernels.evaluate(p, exp, "numpy")
    g = kernels.weighted_gradient(p, exp, 2 * r / len(exp), "numpy")
    lr, l2 = 0.01, 1e-3
    theta = p.to_vector()
    reg = np.concatenate([theta[:30], np.zeros(15), theta[45:]])
    expected = theta - lr * (g + 2 * l2 * reg)
    for name in BACKENDS:
        w1, b1, w2 = p.w1.copy(), p.b1.copy(), p.w2.copy()
        kernels.sgd_epoch(w1, b1, w2, exp, np.arange(len(exp)), len(exp), lr, l2, name)
        np.testing.assert_allclose(np.concatenate([w1.ravel(), b1, w2]), expected, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("value,expected", [("numpy", "numpy"), ("numba", "numba")])
def test_env_flag_selects_backend(value, expected):
    env = dict(os.environ, NNBVP_BACKEND=value)
    out = subprocess.run([sys.executable, "-c", "import nnbvp; print(nnbvp.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected


def test_env_flag_rejects_unknown():
    env = dict(os.environ, NNBVP_BACKEND="cuda")
    out = subprocess.run([sys.executable, "-c", "import nnbvp"], env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "NNBVP_BACKEND" in out.stderr
