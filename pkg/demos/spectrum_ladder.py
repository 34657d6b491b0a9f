"""Dynamical spectrum of the B1 linear family along a decreasing eps ladder.

The two spectral intervals stay near the averaged eigenvalues 0 and -1 and
the dichotomy projection approaches the averaged projection.
"""
import numpy as np

from skewflow import benchmarks as B
from skewflow.spectrum import LinearFamily, averaged_split, dichotomy_projection, dynamical_spectrum


def main():
    fld = B.b1()
    fam = LinearFamily.from_field(fld)
    Q0 = averaged_split(fld).Q0
    grid = fld.flow.grid(3)
    for eps in (0.2, 0.1, 0.05):
        est = dynamical_spectrum(fam, eps, T=100.0, n_starts=2)
        q = dichotomy_projection(fam, grid, eps, -0.375)
        dev = np.max(np.linalg.norm(q - Q0, ord=2, axis=(1, 2)))
        ivs = ", ".join(f"[{lo:+.4f}, {hi:+.4f}]" for lo, hi in est.intervals)
        print(f"eps={eps:<5} intervals {ivs}   sup_p |Q - Q0| = {dev:.4f}")


if __name__ == "__main__":
    main()
