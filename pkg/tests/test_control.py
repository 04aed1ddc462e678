import numpy as np
import pytest

from fmbelief.control import dare_residual, lqr_gain, solve_dare, zero_gain
from fmbelief.errors import ConditioningError, ConvergenceError
from fmbelief.model import LqgModel, default_model

GOLDEN = (1 + np.sqrt(5)) / 2


def scalar_model(a=1.0, b=1.0, q=1.0, r=1.0):
    return LqgModel(A=[[a]], B=[[b]], C=[[1.0]], sigma_w=[[1.0]], sigma_v=[[1.0]],
                    Q=[[q]], R=[[r]], prior_mean=[0.0], prior_cov=[[1.0]])


def test_zero_dynamics_gives_Q():
    Q = np.array([[2.0, 0.5], [0.5, 1.0]])
    P, res = solve_dare(np.zeros((2, 2)), np.ones((2, 1)), Q, np.eye(1))
    np.testing.assert_array_equal(P, Q)
    assert res == 0.0


def test_zero_dynamics_gain():
    m = default_model().replace(A=np.zeros((2, 2)))
    np.testing.assert_array_equal(lqr_gain(m).K, np.zeros((1, 2)))


def test_scalar_golden_ratio():
    # p^2 = p + 1 for a = b = q = r = 1
    P, res = solve_dare([[1.0]], [[1.0]], [[1.0]], [[1.0]])
    assert abs(P[0, 0] - GOLDEN) < 1e-10
    assert res < 1e-10


def test_scalar_gain():
    g = lqr_gain(scalar_model())
    assert abs(g.K[0, 0] - GOLDEN / (1 + GOLDEN)) < 1e-10
    assert abs(g.K[0, 0] - (GOLDEN - 1)) < 1e-10


def test_default_double_integrator():
    m = default_model()
    g = lqr_gain(m)
    assert g.residual < 1e-10
    assert dare_residual(m.A, m.B, m.Q, m.R, g.P_dare) < 1e-8
    assert np.max(np.abs(np.linalg.eigvals(m.A - m.B @ g.K))) < 1
    assert g.spectral_radius < 1
    np.testing.assert_allclose(g.P_dare, g.P_dare.T, atol=0)
    assert np.linalg.eigvalsh(g.P_dare)[0] > 0


@pytest.mark.parametrize("scale", [1e-3, 0.5, 7.0, 1e3])
def test_gain_invariant_to_cost_scaling(scale):
    m = default_model()
    K = lqr_gain(m).K
    K2 = lqr_gain(m.replace(Q=scale * m.Q, R=scale * m.R)).K
    np.testing.assert_allclose(K2, K, atol=1e-9)


def test_unstabilizable_raises():
    with pytest.raises(ConvergenceError):
        solve_dare([[2.0]], [[0.0]], [[1.0]], [[1.0]], max_iter=5000)


def test_iteration_cap():
    with pytest.raises(ConvergenceError) as info:
        solve_dare([[0.99]], [[0.01]], [[1.0]], [[1.0]], max_iter=3)
    assert info.value.residual > 0


def test_singular_inner_matrix():
    with pytest.raises(ConditioningError):
        solve_dare([[0.5]], [[0.0]], [[1.0]], [[0.0]])


def test_zero_gain():
    m = default_model()
    g = zero_gain(m)
    assert not g.K.any()
    assert g.spectral_radius == pytest.approx(1.0)
