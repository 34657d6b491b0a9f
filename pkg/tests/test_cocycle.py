import numpy as np
import pytest
from hypothesis import given, strategies as st

from skewflow import benchmarks as B
from skewflow.cocycle import FlowPoint, cocycle_defect, evolve, fast_evolve, fd_jacobian, trajectory
from skewflow.errors import ConfigurationError, Escape
from skewflow.integrate import FlowConfig, integrate


def scalar_exact(theta0, x0, t, omega=np.sqrt(2.0)):
    """Closed form of x' = -x + cos(theta0 + omega t)."""
    a = lambda th: (np.cos(th) + omega * np.sin(th)) / (1 + omega ** 2)
    return a(theta0 + omega * t) + (x0 - a(theta0)) * np.exp(-t)


@given(st.floats(0, 6.28), st.floats(-2, 2), st.floats(-3, 3))
def test_scalar_model_matches_closed_form(theta0, x0, t):
    z = FlowPoint(np.array([theta0]), np.array([x0]))
    out = evolve(z, t, B.b1_scalar())
    assert out.x[0] == pytest.approx(scalar_exact(theta0, x0, t), abs=1e-7)


def test_rk4_is_fourth_order():
    fld = B.b1_scalar()
    z = FlowPoint(np.array([0.4]), np.array([1.0]))
    exact = scalar_exact(0.4, 1.0, 2.0)
    errs = []
    for h in (0.1, 0.05, 0.025):
        out = evolve(z, 2.0, fld, cfg=FlowConfig("rk4", max_step=h))
        errs.append(abs(out.x[0] - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 3.7)


@pytest.mark.parametrize("name", ["B1", "B2"])
def test_cocycle_law_slow_and_fast(name, rng):
    fld = B.get(name)
    for _ in range(5):
        z = FlowPoint(rng.uniform(0, 6.28, 2), rng.uniform(-0.5, 0.5, 2))
        s, t = rng.uniform(-3, 3, 2)
        assert cocycle_defect(z, s, t, fld, 0.1) < 1e-6
        assert cocycle_defect(z, s, t, fld, 0.1, fast=True) < 1e-6


def test_fast_time_is_rescaled_slow_time():
    fld = B.b2()
    z = FlowPoint(np.array([0.1, 0.2]), np.array([0.3, -0.2]))
    eps = 0.05
    slow = evolve(z, 20.0, fld, eps)
    fast = fast_evolve(z, 20.0 * eps, fld, eps)
    np.testing.assert_allclose(slow.x, fast.x, atol=1e-8)
    np.testing.assert_allclose(slow.p, fast.p, atol=1e-12)


def test_batch_evolution_matches_single(rng):
    fld = B.b2()
    p = rng.uniform(0, 6.28, (4, 2))
    x = rng.uniform(-0.3, 0.3, (4, 2))
    batch = evolve(FlowPoint(p, x), 1.5, fld, 0.1)
    for k in range(4):
        single = evolve(FlowPoint(p[k], x[k]), 1.5, fld, 0.1)
        np.testing.assert_allclose(batch.x[k], single.x, atol=1e-8)


def test_zero_section_is_invariant():
    z = FlowPoint(np.array([1.0, 2.0]), np.zeros(2))
    out = evolve(z, 5.0, B.b2(), 0.1)
    assert np.all(out.x == 0.0)


def test_escape_is_reported():
    from skewflow.cocycle import VectorField
    blow = VectorField(1, lambda th, x, eps: x ** 2, B.CIRCLE)
    with pytest.raises(Escape) as info:
        evolve(FlowPoint(np.zeros(1), np.ones(1)), 2.0, blow, cfg=FlowConfig(blowup_radius=100.0))
    assert 0.9 < info.value.t_exit < 1.0
    assert np.isnan(cocycle_defect(FlowPoint(np.zeros(1), np.ones(1)), 1.5, 1.0, blow))


def test_fd_jacobian_matches_analytic(rng):
    fld = B.b2()
    th = rng.uniform(0, 6.28, (6, 2))
    x = rng.uniform(-1, 1, (6, 2))
    fd = fd_jacobian(lambda y: fld.func(th, y, 0.0), x)
    np.testing.assert_allclose(fd, fld.jacobian(th, x), atol=1e-8)


def test_nonlinear_part_of_b2():
    fld = B.b2()
    x = np.array([[0.3, -0.2]])
    np.testing.assert_allclose(fld.nonlinear_part(np.zeros((1, 2)), x), [[0.06, 0.09]], atol=1e-12)


def test_trajectory_shape_and_adaptive_matches_rk4():
    fld = B.b1()
    z = FlowPoint(np.zeros(2), np.array([1.0, 0.0]))
    tr = trajectory(z, [0.5, 1.0, 2.0], fld, 0.1)
    assert tr.shape == (3, 1, 2)
    ref = trajectory(z, [0.5, 1.0, 2.0], fld, 0.1, cfg=FlowConfig("rk4", max_step=1e-3))
    np.testing.assert_allclose(tr, ref, atol=1e-8)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        FlowConfig(rel_tol=-1.0)
    with pytest.raises(ConfigurationError):
        FlowConfig("euler")
    with pytest.raises(ConfigurationError):
        fast_evolve(FlowPoint(np.zeros(2), np.zeros(2)), 1.0, B.b1(), 0.0)


def test_integrate_backward():
    out = integrate(lambda t, y: -y, np.ones((1, 1)), 0.0, [-1.0, -2.0])
    np.testing.assert_allclose(out[:, 0, 0], np.exp([1.0, 2.0]), rtol=1e-8)
