"""Reduction-principle check on B2 and on B2 with extra center damping.

B2's reduced flow is cubic, so at the admissible Delta it barely moves by
s = 40 and the reduced-attraction precondition is not met.  Adding linear
damping to the center makes the reduced flow attract exponentially and
the full-space check passes with the same code.
"""
import numpy as np

from skewflow import benchmarks as B
from skewflow.reduction import BlockedNonlinearity, build_frame, pliss_check, select_constants
from skewflow.spectrum import LinearFamily, averaged_split


def run(name):
    fld = B.get(name)
    frame = build_frame(LinearFamily.from_field(fld), np.zeros(2), 0.05, 45.0, averaged_split(fld),
                        step=0.005, s_start=-160.0)
    blocked = BlockedNonlinearity(frame, fld)
    constants, chart = select_constants(frame, blocked, chart_kwargs=dict(tol=1e-11))
    rep = pliss_check(frame, chart, blocked, constants)
    d = rep.diagnostics
    print(f"{name:>10}: Delta={constants.Delta:.4g}  reduced terminal={d['reduced_terminal']:.3e}  "
          f"full terminal={d['terminal']:.3e}  containment={d['containment']:.1e}  -> {rep.verdict}")


if __name__ == "__main__":
    for name in ("B2", "B2-damped"):
        run(name)
