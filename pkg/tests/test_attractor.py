import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from skewflow import benchmarks as B
from skewflow import io
from skewflow.attractor import (FiberedSet, Section, directed_hausdorff, fixed_point_section, hausdorff,
                                lyapunov_test, pullback_test, xi_map)
from skewflow.errors import ChartViolation, ConfigurationError, ContractionError


def hausdorff_loops(a, b):
    """Double-loop oracle."""
    def directed(p, q):
        return max(min(np.linalg.norm(x - y) for y in q) for x in p)
    return max(directed(a, b), directed(b, a))


clouds = st.integers(1, 12).flatmap(
    lambda n: arrays(float, (n, 2), elements=st.floats(-10, 10, allow_nan=False, width=64)))


@given(clouds, clouds)
def test_hausdorff_matches_double_loop(a, b):
    assert hausdorff(a, b) == pytest.approx(hausdorff_loops(a, b), abs=1e-12)


@given(clouds, clouds, clouds)
def test_hausdorff_metric_axioms(a, b, c):
    # exact symmetry: both orders evaluate the same two directed distances
    assert hausdorff(a, b) == hausdorff(b, a)
    assert hausdorff(a, a) == 0.0
    assert hausdorff(a, c) <= hausdorff(a, b) + hausdorff(b, c) + 1e-12


def test_directed_hausdorff_is_asymmetric():
    a = np.array([[0.0, 0.0]])
    b = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert directed_hausdorff(a, b) == 0.0
    assert directed_hausdorff(b, a) == 5.0


def test_section_interpolation_reproduces_nodes_and_is_periodic():
    sec = Section.from_function(lambda th: np.sin(th[:, :1]) + np.cos(th[:, 1:]), 16, 2)
    nodes = sec.nodes()
    np.testing.assert_allclose(sec(nodes), sec.node_values(), atol=1e-14)
    np.testing.assert_allclose(sec(nodes + 2 * np.pi), sec.node_values(), atol=1e-12)


def test_section_interpolation_is_second_order():
    errs = []
    for n in (32, 64):
        sec = Section.from_function(lambda th: np.sin(th), n, 1)
        q = np.linspace(0, 2 * np.pi, 1001)[:, None]
        errs.append(np.max(np.abs(sec(q)[:, 0] - np.sin(q[:, 0]))))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_xi_map_on_exact_section_is_identity():
    fld = B.b1_scalar()
    # off-grid pull-back points are interpolated, so the defect is O(h^2)
    defects = []
    for n in (256, 512):
        sec = Section.from_function(lambda th: B.scalar_section_exact(th[:, 0])[:, None], n, 1)
        defects.append(xi_map(sec, 1.0, fld).sup_distance(sec))
    assert defects[1] < 1e-5
    assert defects[0] / defects[1] > 3.0


def test_fixed_point_small_grid():
    fld = B.b1_scalar()
    fp = fixed_point_section(Section(np.zeros((64, 1))), 1.0, fld, tol=1e-10)
    exact = B.scalar_section_exact(fp.section.nodes()[:, 0])
    # interpolation error of a 64-node grid
    assert np.max(np.abs(fp.section.node_values()[:, 0] - exact)) < 1e-3
    assert fp.alpha_hat == pytest.approx(np.exp(-1.0), abs=1e-3)
    section, alpha = fp
    assert section is fp.section and alpha == fp.alpha_hat
    # increments shrink geometrically
    inc = np.array(fp.increments)
    assert np.all(inc[1:] < inc[:-1])


def test_fixed_point_detects_expansion():
    from skewflow.cocycle import VectorField
    grow = VectorField(1, lambda th, x, eps: 0.5 * x + np.cos(th), B.CIRCLE)
    with pytest.raises((ContractionError, ChartViolation)):
        fixed_point_section(Section(np.zeros((16, 1))), 1.0, grow, tol=1e-12)
    with pytest.raises(ConfigurationError):
        fixed_point_section(Section(np.zeros((16, 1))), 1.0, grow, tol=-1.0)


@pytest.fixture(scope="module")
def scalar_attractor():
    fld = B.b1_scalar()
    sec = Section.from_function(lambda th: B.scalar_section_exact(th[:, 0])[:, None], 64, 1)
    return fld, sec


def test_pullback_accepts_graph_and_rejects_decoy(scalar_attractor):
    fld, sec = scalar_attractor
    A = sec.graph()
    D = FiberedSet(A.base_grid, [np.array([[-0.5], [0.5]])] * len(A.base_grid), grid_shape=A.grid_shape)
    good = pullback_test(A, D, [2.0, 4.0, 8.0], fld, tol=1e-3)
    bad = pullback_test(sec.graph(0.5), D, [2.0, 4.0, 8.0], fld, tol=1e-3)
    assert good.passed and not bad.passed
    curve = [v for _, v in good.convergence_curve]
    assert curve[-1] < 1e-3 and curve[0] > curve[-1]


def test_lyapunov_accepts_graph_and_rejects_decoy(scalar_attractor):
    fld, sec = scalar_attractor
    good = lyapunov_test(sec.graph(), 1.0, [0.5], fld, sample_count=16, horizon=12.0, tol=1e-3)
    bad = lyapunov_test(sec.graph(0.5), 1.0, [0.5], fld, sample_count=16, horizon=12.0, tol=1e-3)
    assert good.passed and not bad.passed


def test_section_and_fibered_csv_roundtrip(tmp_path):
    sec = Section.from_function(lambda th: np.stack([np.sin(th[:, 0]), np.cos(th[:, 1])], 1), 5, 2)
    io.write_section(tmp_path / "s.csv", sec)
    back = io.read_section(tmp_path / "s.csv")
    np.testing.assert_array_equal(back.values, sec.values)
    fs = FiberedSet(sec.nodes(), [np.array([[1.0, 2.0], [3.0, 4.0]])] * len(sec.nodes()), grid_shape=(5, 5))
    io.write_fibered(tmp_path / "f.csv", fs)
    fb = io.read_fibered(tmp_path / "f.csv")
    np.testing.assert_array_equal(fb.points(), fs.points())
    assert (tmp_path / "f.csv").read_text().splitlines()[1].startswith("node,k,theta1,theta2,x1,x2")


def test_hausdorff_on_product_space_uses_circular_base_distance():
    a = (np.array([[0.1]]), np.array([[0.0]]))
    b = (np.array([[2 * np.pi - 0.1]]), np.array([[1.0]]))
    assert hausdorff(a, b) == pytest.approx(1.2, abs=1e-12)
