"""Fixed point of the section operator for x' = -x + cos(theta), theta' = sqrt 2.

Iterates the section operator from the zero section, compares with the
closed-form graph and runs both attractor tests on the graph and on a
shifted decoy.
"""
import numpy as np

from skewflow import benchmarks as B
from skewflow.attractor import FiberedSet, Section, fixed_point_section, lyapunov_test, pullback_test


def main():
    fld = B.b1_scalar()
    fp = fixed_point_section(Section(np.zeros((512, 1))), 1.0, fld, tol=1e-10)
    exact = B.scalar_section_exact(fp.section.nodes()[:, 0])
    print(f"iterations: {len(fp.increments)}  alpha_hat: {fp.alpha_hat:.6f}  (exp(-1) = {np.exp(-1):.6f})")
    print(f"sup error against closed form: {np.max(np.abs(fp.section.node_values()[:, 0] - exact)):.2e}")

    coarse = Section(fp.section(np.linspace(0, 2 * np.pi, 64, endpoint=False)[:, None]))
    A = coarse.graph()
    D = FiberedSet(A.base_grid, [np.array([[-0.5], [0.5]])] * len(A.base_grid), grid_shape=A.grid_shape)
    for label, target in (("graph", A), ("graph + 0.5", coarse.graph(0.5))):
        pb = pullback_test(target, D, [2.0, 5.0, 10.0], fld, tol=1e-4)
        ly = lyapunov_test(target, 1.0, [0.5], fld, sample_count=16, horizon=15.0)
        print(f"{label:>12}: pullback {pb.verdict} (final {pb.diagnostics['final']:.2e}), lyapunov {ly.verdict}")


if __name__ == "__main__":
    main()
