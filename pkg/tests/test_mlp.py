import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nnbvp.mlp import (
    MultiIndex,
    NetworkParams,
    forward,
    init_params,
    multi_indices,
    param_gradient,
    partial,
    sigmoid_k,
    sigmoid_table,
)

from oracles import central_gradient, close, fd_partial


def test_init_is_deterministic():
    a = init_params(15, 2, seed=7)
    b = init_params(15, 2, seed=7)
    assert np.array_equal(a.to_vector(), b.to_vector())


def test_init_shapes():
    p = init_params(1, 1, seed=0)
    assert p.w1.shape == (1, 1)
    assert p.b1.shape == (1,) and p.w2.shape == (1,)


def test_init_seed_sensitivity():
    assert not np.array_equal(init_params(15, 2, 7).to_vector(), init_params(15, 2, 8).to_vector())


def test_init_range():
    v = init_params(45, 2, 3).to_vector()
    assert v.min() >= -0.5 and v.max() <= 0.5


@pytest.mark.parametrize("h,n", [(0, 2), (3, 0)])
def test_init_rejects_empty(h, n):
    with pytest.raises(ValueError):
        init_params(h, n, 0)


def test_params_reject_nonfinite_and_mismatch():
    with pytest.raises(ValueError):
        NetworkParams([[np.nan, 0.0]], [0.0], [1.0])
    with pytest.raises(ValueError):
        NetworkParams(np.zeros((2, 2)), np.zeros(3), np.zeros(2))


def test_vector_roundtrip():
    p = init_params(4, 3, 1)
    q = NetworkParams.from_vector(p.to_vector(), 4, 3)
    assert np.array_equal(p.w1, q.w1) and np.array_equal(p.b1, q.b1)


def test_multi_index_limits():
    assert MultiIndex((2, 1)).total == 3
    with pytest.raises(ValueError):
        MultiIndex((2, 2))
    with pytest.raises(ValueError):
        MultiIndex((-1, 0))
    assert len(multi_indices(2)) == 10


@pytest.mark.parametrize("order,expected", [(0, 0.5), (1, 0.25), (2, 0.0)])
def test_sigmoid_at_zero(order, expected):
    assert sigmoid_k(order, 0.0) == expected


def test_sigmoid_third_order_finite_difference():
    h = 1e-4
    fd = (sigmoid_k(2, h) - sigmoid_k(2, -h)) / (2 * h)
    assert close(sigmoid_k(3, 0.0), fd, rtol=1e-6, atol=0.0)


def test_sigmoid_fourth_order_internal():
    z = np.linspace(-4, 4, 17)
    h = 1e-4
    fd = (sigmoid_table(z + h)[3] - sigmoid_table(z - h)[3]) / (2 * h)
    np.testing.assert_allclose(sigmoid_table(z)[4], fd, rtol=1e-6, atol=1e-10)


def test_sigmoid_rejects_high_order():
    with pytest.raises(ValueError):
        sigmoid_k(4, 0.0)


@given(st.floats(-700, 700), st.integers(0, 3))
def test_sigmoid_bounded(z, order):
    assert abs(sigmoid_k(order, z)) <= 1.0


def test_forward_zero_output_weights():
    p = init_params(6, 2, 0).replace(w2=np.zeros(6))
    assert forward(p, [0.2, 0.9]) == 0.0


def test_forward_single_unit():
    p = NetworkParams([[0.0]], [0.0], [2.0])
    assert forward(p, [0.7]) == 1.0


def test_forward_matches_scalar_reimplementation():
    p = init_params(2, 2, 11)
    x = (0.3, 0.4)
    expected = 0.0
    for i in range(2):
        h = p.w1[i, 0] * x[0] + p.w1[i, 1] * x[1] + p.b1[i]
        expected += p.w2[i] / (1.0 + math.exp(-h))
    assert forward(p, x) == pytest.approx(expected, rel=1e-14)


def test_forward_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        forward(init_params(3, 2, 0), [0.1, 0.2, 0.3])


def test_partial_zero_index_is_forward():
    p = init_params(15, 2, 5)
    x = np.array([0.12, 0.88])
    assert partial(p, x, (0, 0)) == forward(p, x)


def test_partial_first_order_single_unit():
    p = NetworkParams([[1.0]], [0.0], [1.0])
    assert partial(p, [0.0], (1,)) == 0.25


def test_partial_batch_matches_single():
    p = init_params(7, 2, 2)
    x = np.array([[0.1, 0.2], [0.5, 0.9], [1.0, 0.0]])
    batch = partial(p, x, (1, 2))
    assert np.allclose(batch, [partial(p, xi, (1, 2)) for xi in x], rtol=0, atol=1e-15)


def test_partial_rejects_order_above_three():
    with pytest.raises(ValueError):
        partial(init_params(3, 2, 0), [0.1, 0.2], (3, 1))


def test_partial_21_finite_difference():
    p = init_params(15, 2, 7)
    x = (0.3, 0.7)
    assert close(partial(p, x, (2, 1)), fd_partial(p, x, (2, 1), step=1e-3), rtol=1e-4, atol=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_mixed_partial_symmetry(seed):
    p = init_params(15, 2, seed)
    x = np.random.default_rng(seed).uniform(0, 1, 2)
    exact = partial(p, x, (1, 1))
    for axis_order in ([0, 1], [1, 0]):
        assert close(exact, fd_partial(p, x, None, 1e-3, axis_order), rtol=1e-4, atol=1e-8)


@given(st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=50)
def test_partial_linear_in_output_weights(a, b):
    p = init_params(9, 2, 4)
    rng = np.random.default_rng(0)
    u, v = rng.uniform(-1, 1, 9), rng.uniform(-1, 1, 9)
    x = [0.35, 0.65]
    for idx in multi_indices(2):
        lhs = partial(p.replace(w2=a * u + b * v), x, idx)
        rhs = a * partial(p.replace(w2=u), x, idx) + b * partial(p.replace(w2=v), x, idx)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)


@given(
    st.lists(st.floats(-50, 50), min_size=2, max_size=2),
    st.integers(0, 2**31 - 1),
)
@settings(max_examples=50)
def test_outputs_finite(x, seed):
    p = init_params(15, 2, seed).replace(w1=init_params(15, 2, seed).w1 * 40)
    for idx in multi_indices(2):
        assert np.isfinite(partial(p, x, idx))


def test_param_gradient_output_weights_at_zero_index():
    p = init_params(5, 2, 3)
    x = np.array([0.2, 0.6])
    g = param_gradient(p, x, (0, 0))
    assert np.allclose(g.w2, sigmoid_k(0, p.w1 @ x + p.b1), rtol=0, atol=1e-16)
    g2 = param_gradient(p.replace(w2=5 * p.w2), x, (0, 0))
    assert np.array_equal(g.w2, g2.w2)


def test_param_gradient_zero_output_weights():
    p = init_params(5, 2, 3).replace(w2=np.zeros(5))
    for idx in multi_indices(2):
        g = param_gradient(p, [0.4, 0.1], idx)
        assert not g.w1.any() and not g.b1.any()


def _check_param_gradient(p, x, idx, rtol):
    g = param_gradient(p, x, idx).to_vector()
    f = lambda v: partial(NetworkParams.from_vector(v, p.h_count, p.input_dim), x, idx)
    fd = central_gradient(f, p.to_vector(), 1e-5)
    np.testing.assert_allclose(g, fd, rtol=rtol, atol=1e-8)


def test_param_gradient_10_finite_difference():
    _check_param_gradient(init_params(2, 2, 21), np.array([0.5, 0.5]), (1, 0), 1e-5)


@pytest.mark.parametrize("idx", [m.orders for m in multi_indices(2)])
def test_param_gradient_every_index(idx):
    _check_param_gradient(init_params(15, 2, 9), np.array([0.23, 0.81]), idx, 1e-5)
