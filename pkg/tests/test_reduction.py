import numpy as np
import pytest
from hypothesis import given, strategies as st

from skewflow import benchmarks as B
from skewflow.cocycle import VectorField
from skewflow.errors import ConfigurationError
from skewflow.reduction import (BlockedNonlinearity, build_frame, check_partial_s_h, gauge_derivative,
                                graph_transform_h, invariance_defect, roundtrip_error)
from skewflow.reduction.chart import diff_matrix, interp_matrix, lobatto_nodes
from skewflow.reduction.frame import fd_derivative, principal_angle
from skewflow.spectrum import LinearFamily, averaged_split, split_matrix


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=9))
def test_chebyshev_operators_exact_on_polynomials(coef):
    nodes = lobatto_nodes(9, 1.5)
    poly = np.polynomial.Polynomial(coef)
    np.testing.assert_allclose(diff_matrix(nodes) @ poly(nodes), poly.deriv()(nodes), atol=1e-9)
    q = np.linspace(-1.5, 1.5, 7)
    np.testing.assert_allclose(interp_matrix(nodes, q) @ poly(nodes), poly(q), atol=1e-10)


def test_lobatto_nodes_are_ascending_and_symmetric():
    nodes = lobatto_nodes(33, 2.0)
    assert np.all(np.diff(nodes) > 0)
    np.testing.assert_allclose(nodes, -nodes[::-1], atol=1e-15)
    assert nodes[0] == -2.0 and nodes[16] == pytest.approx(0.0, abs=1e-15)


def test_fd_derivative_fourth_order():
    errs = []
    for h in (0.1, 0.05):
        s = np.arange(-2, 40) * h
        vals = np.sin(s)[:, None, None]
        errs.append(np.max(np.abs(fd_derivative(vals, h)[:, 0, 0] - np.cos(s[2:-2]))))
    assert errs[0] / errs[1] > 14.0


@pytest.fixture(scope="module")
def b1_frame():
    fld = B.b1()
    return build_frame(LinearFamily.from_field(fld), np.array([0.2, 0.7]), 0.1, 10.0,
                       averaged_split(fld, horizon=2000.0), step=0.005, pad=25.0)


def test_frame_blocks_b1(b1_frame):
    fr = b1_frame
    assert fr.offdiag_defect <= 1e-4 * (1.0 + fr.l_norm)
    np.testing.assert_allclose(fr.sigma @ fr.sigma_inv, np.broadcast_to(np.eye(2), fr.sigma.shape), atol=1e-12)
    # columns are unit vectors spanning two transversal lines
    np.testing.assert_allclose(np.linalg.norm(fr.sigma, axis=1), 1.0, atol=1e-12)
    assert fr.min_angle > 45.0
    assert fr.Q.shape == fr.sigma.shape
    np.testing.assert_allclose(fr.Q @ fr.Q, fr.Q, atol=1e-10)


def test_gauge_oracle_matches_finite_differences(b1_frame):
    fr = b1_frame
    # sigma' from finite differences against (I - C C^T) l C per block
    assert np.max(np.abs(gauge_derivative(fr) - fr.sigma_prime)) < 1e-3


def test_roundtrip_against_adaptive_solve(b1_frame):
    assert roundtrip_error(b1_frame, np.array([1.0, 0.0])) < 1e-5
    assert roundtrip_error(b1_frame, np.array([0.0, 1.0])) < 1e-5


def test_frame_sigma_interpolation(b1_frame):
    fr = b1_frame
    np.testing.assert_allclose(fr.sigma_at(fr.s_grid[100]), fr.sigma[100], atol=1e-12)
    mid = 0.5 * (fr.s_grid[100] + fr.s_grid[101])
    # cubic Hermite midpoint: (y0 + y1)/2 + h (y0' - y1')/8
    hermite = 0.5 * (fr.sigma[100] + fr.sigma[101]) + fr.step / 8 * (fr.sigma_prime[100] - fr.sigma_prime[101])
    np.testing.assert_allclose(fr.sigma_at(mid), hermite, atol=1e-12)


def test_principal_angle_of_axes():
    e1 = np.array([[[1.0], [0.0]]])
    e2 = np.array([[[0.0], [1.0]]])
    assert principal_angle(e1, e2)[0] == pytest.approx(np.pi / 2)


def test_frame_rejects_zero_eps():
    fld = B.b1()
    with pytest.raises(ConfigurationError):
        build_frame(LinearFamily.from_field(fld), np.zeros(2), 0.0, 10.0, split_matrix(np.diag([0.0, -1.0])))


# ------------------------------------------------ chart with an exact oracle

RATE = 0.1
EPS = 0.5


def _exact_field():
    def func(th, x, eps):
        return np.stack([RATE * x[:, 0], -x[:, 1] + x[:, 0] ** 2 * (1 + 0.5 * np.cos(th[:, 0]))], 1)

    def jac(th, x, eps):
        j = np.zeros((len(x), 2, 2))
        j[:, 0, 0] = RATE
        j[:, 1, 1] = -1.0
        j[:, 1, 0] = 2 * x[:, 0] * (1 + 0.5 * np.cos(th[:, 0]))
        return j

    return VectorField(2, func, B.TORUS2, jacobian=jac, name="exact-graph")


def _exact_c(s, p1):
    # bounded solution of c' = -(1 + 2 RATE) c + 1 + 0.5 cos(p1 + w s)
    k, w = 1 + 2 * RATE, 1.0 / EPS
    phi = p1 + w * s
    return 1 / k + 0.5 * (k * np.cos(phi) + w * np.sin(phi)) / (k ** 2 + w ** 2)


@pytest.fixture(scope="module")
def exact_chart():
    fld = _exact_field()
    split = split_matrix(np.diag([RATE, -1.0]))
    fr = build_frame(LinearFamily.from_field(fld), np.array([0.3, 0.0]), EPS, 40.0, split, step=0.005, pad=10.0)
    bl = BlockedNonlinearity(fr, fld)
    chart = graph_transform_h(fr, bl, 0.5, S_w=30.0, tol=1e-12)
    return fr, bl, chart


def test_chart_matches_exact_graph(exact_chart):
    fr, bl, chart = exact_chart
    idx = np.arange(chart.valid_from, len(fr.s_grid), 50)
    sign = fr.sigma[idx, 1, 1] * fr.sigma[idx, 0, 0] ** 2  # frame axes may be flipped
    exact = _exact_c(fr.s_grid[idx], fr.p[0])[:, None] * chart.u_grid[None] ** 2 * sign[:, None]
    assert np.max(np.abs(chart.values[idx, :, 0] - exact)) < 1e-6


def test_chart_tangency_and_invariance(exact_chart):
    fr, bl, chart = exact_chart
    idx = np.arange(chart.valid_from, len(fr.s_grid) - 2)
    j0 = int(np.argmin(np.abs(chart.u_grid)))
    assert np.all(chart.values[idx, j0] == 0.0)
    assert np.max(np.abs(chart.du(idx, np.zeros((len(idx), 1))))) < 1e-8
    assert invariance_defect(chart, fr, bl, int(idx[10]), np.linspace(-0.5, 0.5, 5)) < 1e-8
    assert check_partial_s_h(chart, fr, bl) < 1e-4


def test_blocked_nonlinearity_node_and_time_forms_agree(exact_chart):
    fr, bl, _ = exact_chart
    i = 1234
    u = np.array([[[0.2]]])
    v = np.array([[[-0.1]]])
    g1, g2 = bl.at_nodes(np.array([i]), u, v)
    h1, h2 = bl.g(fr.s_grid[i], u[0], v[0])
    np.testing.assert_allclose(g1[0], h1, atol=1e-12)
    np.testing.assert_allclose(g2[0], h2, atol=1e-12)


def test_reduction_constants_validation():
    from skewflow.reduction import ReductionConstants
    c = ReductionConstants(0.25, 0.5, 0.1, 1.0, 0.01, 0.25, 0.01)
    assert c.admissibility_bound == pytest.approx(0.15)
    assert c.admissible
    assert not ReductionConstants(0.25, 0.5, 0.1, 1.0, 0.01, 0.25, 0.1).admissible
    with pytest.raises(ConfigurationError):
        ReductionConstants(0.25, 0.5, 0.3, 1.0, 0.01, 0.25, 0.01)
