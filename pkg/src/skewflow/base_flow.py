"""Irrational rotation flows on the m-torus.

Base points are arrays of angles in [0, 2*pi).  Every function accepts a
single point of shape ``(m,)`` or a batch of shape ``(n, m)``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, EvaluationError

TWO_PI = 2.0 * np.pi


def wrap(angles):
    """Reduce angles modulo 2*pi into [0, 2*pi)."""
    out = np.mod(angles, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    return np.where(out >= TWO_PI, 0.0, out)


def lattice_l1_ball(m, radius):
    """Integer vectors k in Z^m with 0 < |k|_1 <= radius, one of each +-k pair."""
    pts = np.zeros((1, 0), dtype=np.int64)
    for _ in range(m):
        used = np.abs(pts).sum(axis=1)
        blocks = []
        for v in range(-radius, radius + 1):
            keep = used + abs(v) <= radius
            if np.any(keep):
                sub = pts[keep]
                blocks.append(np.hstack([sub, np.full((len(sub), 1), v, dtype=np.int64)]))
        pts = np.vstack(blocks)
    pts = pts[np.abs(pts).sum(axis=1) > 0]
    # keep the representative whose first nonzero entry is positive
    first = np.array([row[np.flatnonzero(row)[0]] for row in pts]) if len(pts) else np.zeros(0)
    return pts[first > 0]


def find_resonance(frequencies, bound=50, rtol=1e-10):
    """Return an integer vector k with k.omega ~ 0 and |k|_1 <= bound, or None."""
    omega = np.asarray(frequencies, dtype=float)
    if omega.size == 1:
        return np.array([1]) if omega[0] == 0.0 else None
    ks = lattice_l1_ball(omega.size, bound)
    combos = ks @ omega
    scale = np.abs(ks) @ np.abs(omega)
    hit = np.abs(combos) <= rtol * np.maximum(scale, 1.0)
    if np.any(hit):
        return ks[np.argmax(hit)]
    return None


@dataclass(frozen=True)
class BaseFlow:
    """Linear flow t -> p + t*omega (mod 2*pi) on the m-torus.

    The frequencies are checked at construction for integer resonances
    up to ``resonance_check_bound`` in the l1 norm.
    """

    frequencies: tuple
    resonance_check_bound: int = 50
    omega: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        omega = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        if omega.ndim != 1 or omega.size == 0 or not np.all(np.isfinite(omega)):
            raise ConfigurationError(f"bad frequency vector {self.frequencies!r}")
        k = find_resonance(omega, self.resonance_check_bound)
        if k is not None:
            raise ConfigurationError(f"resonant frequencies: k={k.tolist()} gives k.omega ~ 0")
        object.__setattr__(self, "frequencies", tuple(float(w) for w in omega))
        object.__setattr__(self, "omega", omega)

    @property
    def dim(self):
        return self.omega.size

    def advance(self, p, t):
        return advance(p, t, self)

    def metric(self, p1, p2):
        return base_metric(p1, p2)

    def ergodic_average(self, g, p, horizon, step=1e-2):
        return ergodic_average(g, p, horizon, step, self)

    def grid(self, n):
        """Regular grid with n nodes per angle, shape (n**m, m), C order."""
        axes = [np.arange(n) * (TWO_PI / n)] * self.dim
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=-1)

    def random_points(self, n, rng):
        return rng.uniform(0.0, TWO_PI, size=(n, self.dim))


def _check_dim(p, m):
    p = np.asarray(p, dtype=float)
    if p.shape[-1:] != (m,):
        raise ConfigurationError(f"base point of shape {p.shape} does not match torus dimension {m}")
    return p


def advance(p, t, flow):
    """Rotate base point(s) p by time t.

    ``t`` may be a scalar or an array broadcastable against the leading
    axes of ``p``.
    """
    p = _check_dim(p, flow.dim)
    t = np.asarray(t, dtype=float)
    return wrap(p + t[..., None] * flow.omega)


def base_metric(p1, p2):
    """Sum over coordinates of the circular distance."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape[-1] != p2.shape[-1]:
        raise ConfigurationError("base points of different dimension")
    diff = np.mod(np.abs(p1 - p2), TWO_PI)
    return np.minimum(diff, TWO_PI - diff).sum(axis=-1)


def ergodic_average(g, p, horizon, step=1e-2, flow=None, chunk=100_000):
    """Time average (1/T) int_0^T g(tau_s p) ds by the composite trapezoid rule.

    ``g`` maps an array of base points (n, m) to values (n,) or (n, k).
    The last sub-interval is shortened so that the grid ends exactly at T.
    """
    if flow is None:
        raise ConfigurationError("ergodic_average needs a BaseFlow")
    if not horizon > 0 or not step > 0:
        raise ConfigurationError("horizon and step must be positive")
    p = _check_dim(p, flow.dim)
    n = int(np.ceil(horizon / step - 1e-9))
    times = np.minimum(np.arange(n + 1) * step, horizon)
    weights = np.diff(times)
    total = None
    for start in range(0, n + 1, chunk):
        ts = times[start:start + chunk]
        vals = np.asarray(g(advance(p, ts, flow)), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise EvaluationError("observable returned a non-finite value")
        # trapezoid weight of node i is (w_{i-1} + w_i) / 2
        idx = np.arange(start, start + len(ts))
        left = np.where(idx > 0, weights[np.maximum(idx - 1, 0)], 0.0)
        right = np.where(idx < n, weights[np.minimum(idx, n - 1)], 0.0)
        w = 0.5 * (left + right)
        part = np.tensordot(w, vals, axes=(0, 0))
        total = part if total is None else total + part
    return total / horizon
