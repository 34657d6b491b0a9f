import numpy as np
import pytest
from hypothesis import given, strategies as st

from skewflow.base_flow import (TWO_PI, BaseFlow, advance, base_metric, ergodic_average, find_resonance,
                                lattice_l1_ball, wrap)
from skewflow.errors import ConfigurationError, EvaluationError

TORUS = BaseFlow((1.0, np.sqrt(2.0)))
angles = st.floats(-50, 50, allow_nan=False)
times = st.floats(-100, 100, allow_nan=False)


def test_lattice_ball_counts_match_brute_force():
    for m, r in [(1, 5), (2, 4), (3, 3)]:
        brute = 0
        for k in np.ndindex(*(2 * r + 1,) * m):
            v = np.array(k) - r
            if 0 < np.abs(v).sum() <= r:
                brute += 1
        assert len(lattice_l1_ball(m, r)) == brute // 2


def test_resonance_detection():
    assert find_resonance([1.0, 2.0]) is not None
    assert find_resonance([1.0, np.sqrt(2.0)]) is None
    assert find_resonance([0.0]) is not None
    with pytest.raises(ConfigurationError):
        BaseFlow((1.0, 1.5))
    with pytest.raises(ConfigurationError):
        BaseFlow((1.0, np.nan))


def test_wrap_range():
    x = np.array([-1e-18, -TWO_PI, 7.0, 0.0, TWO_PI])
    w = wrap(x)
    assert np.all((w >= 0) & (w < TWO_PI))


@given(angles, angles, times, times)
def test_advance_is_a_flow(a, b, s, t):
    p = np.array([a, b])
    lhs = advance(advance(p, s, TORUS), t, TORUS)
    rhs = advance(p, s + t, TORUS)
    assert base_metric(lhs, rhs) < 1e-9


@given(angles, angles, angles, angles, angles, angles)
def test_base_metric_is_a_metric(a1, a2, b1, b2, c1, c2):
    p, q, r = np.array([a1, a2]), np.array([b1, b2]), np.array([c1, c2])
    assert base_metric(p, p) < 1e-12
    assert base_metric(p, q) == pytest.approx(base_metric(q, p), abs=1e-12)
    assert base_metric(p, r) <= base_metric(p, q) + base_metric(q, r) + 1e-12
    assert base_metric(p, q) <= np.pi * 2 + 1e-12


def test_advance_accepts_time_arrays():
    p = np.zeros(2)
    out = advance(p, np.array([0.0, 1.0, 2.0]), TORUS)
    assert out.shape == (3, 2)
    np.testing.assert_allclose(out[2], wrap(2.0 * TORUS.omega))


def test_ergodic_average_oracles():
    p = np.array([0.3, 1.1])
    # constant observable: exact
    assert ergodic_average(lambda th: np.ones(len(th)), p, 10.0, 0.1, TORUS) == pytest.approx(1.0, abs=1e-14)
    # cos(theta1) has a closed-form time average
    T = 50.0
    exact = (np.sin(p[0] + T) - np.sin(p[0])) / T
    got = ergodic_average(lambda th: np.cos(th[:, 0]), p, T, 1e-3, TORUS)
    assert got == pytest.approx(exact, abs=1e-7)
    # zero mean observable tends to zero
    assert abs(ergodic_average(lambda th: np.cos(th[:, 0] - th[:, 1]), p, 1e4, 1e-2, TORUS)) < 1e-2


def test_ergodic_average_trapezoid_exact_for_linear_in_time():
    # theta1(t) - p1 grows linearly; unwrapped, the average of t over [0, T] is T/2
    flow = BaseFlow((1e-3,))
    T = 3.7
    got = ergodic_average(lambda th: th[:, 0], np.zeros(1), T, 0.25, flow)
    assert got == pytest.approx(1e-3 * T / 2, rel=1e-12)


def test_ergodic_average_rejects_non_finite():
    with pytest.raises(EvaluationError):
        ergodic_average(lambda th: np.full(len(th), np.nan), np.zeros(2), 1.0, 0.1, TORUS)
    with pytest.raises(ConfigurationError):
        ergodic_average(lambda th: th[:, 0], np.zeros(2), -1.0, 0.1, TORUS)


def test_grid_shape_and_order():
    g = TORUS.grid(3)
    assert g.shape == (9, 2)
    np.testing.assert_allclose(g[1], [0.0, TWO_PI / 3])
