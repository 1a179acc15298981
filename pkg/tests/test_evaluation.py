import numpy as np
import pytest

from nnbvp.evaluation import e_abs_field, e_norm, relative_l2
from nnbvp.mlp import init_params
from nnbvp.problems import analytic_solution
from nnbvp.sampling import test_grid as make_test_grid

PI = np.pi


def test_e_norm_identity_is_zero():
    ref = np.array([0.3, -1.2, 2.0])
    assert relative_l2(ref, ref.copy()) == 0.0


def test_e_norm_single_point():
    assert relative_l2(np.array([2.0]), np.array([1.0])) == 0.5


def test_e_norm_scales_with_error():
    rng = np.random.default_rng(0)
    ref = rng.normal(size=50)
    delta = rng.normal(size=50) * 1e-3
    assert relative_l2(ref, ref + 2 * delta) == pytest.approx(2 * relative_l2(ref, ref + delta), rel=1e-12)


def test_e_norm_rejects_zero_reference():
    with pytest.raises(ValueError, match="zero"):
        relative_l2(np.zeros(4), np.ones(4))
    # bottom edge of the Laplace problem: analytic field vanishes identically
    edge = np.column_stack([np.linspace(0, 1, 5), np.zeros(5)])
    with pytest.raises(ValueError):
        e_norm("laplace-dirichlet", init_params(3, 2, 0), edge)


def test_e_abs_zero_network_center():
    p = init_params(15, 2, 0).replace(w2=np.zeros(15))
    field = e_abs_field("laplace-dirichlet", p, [[0.5, 0.5]])
    expected = abs(analytic_solution("laplace-dirichlet", [0.5, 0.5]) - 0.5)
    assert field.e_abs[0] == pytest.approx(expected, rel=1e-14)


def test_e_abs_max_and_rms():
    p = init_params(15, 2, 1)
    field = e_abs_field("poisson-mixed", p, make_test_grid())
    assert np.all(field.e_abs >= 0)
    assert field.max_abs == field.e_abs.max()
    assert field.max_abs >= np.sqrt(np.mean(field.e_abs**2))
    assert field.e_abs.shape == (441,)


def test_metrics_are_pure():
    p = init_params(15, 2, 1)
    tg = make_test_grid()
    assert e_norm("poisson-mixed", p, tg) == e_norm("poisson-mixed", p, tg)


def test_empty_point_set_rejected():
    with pytest.raises(ValueError):
        e_abs_field("laplace-dirichlet", init_params(3, 2, 0), np.empty((0, 2)))
