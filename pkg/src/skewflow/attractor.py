"""Attractors of skew-product flows: Hausdorff distances, the section
operator and its fixed point, and the pullback / Lyapunov tests.
"""
from dataclasses import dataclass, field

import numpy as np

from .base_flow import TWO_PI, advance, base_metric, wrap
from .cocycle import FlowPoint, trajectory
from .errors import (ChartViolation, ConfigurationError, ContractionError,
                     ConvergenceError, Escape, HypothesisError)
from .parallel import parallel_map


# ---------------------------------------------------------------- Hausdorff

def _as_points(K):
    if isinstance(K, FiberedSet):
        return K.points()
    if isinstance(K, np.ndarray):
        # plain Euclidean cloud: empty base component
        x = np.atleast_2d(K.astype(float))
        return np.zeros((len(x), 0)), x
    p, x = K
    p = np.atleast_2d(np.asarray(p, dtype=float))
    x = np.asarray(x, dtype=float)
    x = x.reshape(len(p), -1)
    return p, x


def directed_hausdorff(K1, K2, chunk=2048):
    """sup over z1 in K1 of the distance from z1 to K2."""
    p1, x1 = _as_points(K1)
    p2, x2 = _as_points(K2)
    if len(p1) == 0 or len(p2) == 0:
        raise ConfigurationError("Hausdorff distance of an empty set")
    worst = 0.0
    for i in range(0, len(p1), chunk):
        d = (base_metric(p1[i:i + chunk, None, :], p2[None, :, :])
             + np.linalg.norm(x1[i:i + chunk, None, :] - x2[None, :, :], axis=-1))
        worst = max(worst, float(d.min(axis=1).max()))
    return worst


def hausdorff(K1, K2):
    """Hausdorff distance of two finite subsets of torus x R^d.

    Sets are given as (p, x) array pairs, FiberedSets or plain (n, d)
    arrays (Euclidean clouds); the underlying metric is
    base_metric(p1, p2) + |x1 - x2|.
    """
    return max(directed_hausdorff(K1, K2), directed_hausdorff(K2, K1))


def fiber_distance(x, fiber):
    """Distance from each row of x (n, d) to the finite set fiber (k, d)."""
    return np.linalg.norm(x[:, None, :] - fiber[None, :, :], axis=-1).min(axis=1)


# ---------------------------------------------------------------- sections

class Section:
    """Continuous map torus -> R^d sampled on a regular grid.

    ``values`` has shape (n_1, ..., n_m, d).  Evaluation off the grid is
    multilinear with periodic wrap, so node values are reproduced exactly.
    """

    def __init__(self, values, chart_radius=np.inf):
        values = np.asarray(values, dtype=float)
        if values.ndim < 2:
            raise ConfigurationError("section values need shape (n_1, ..., n_m, d)")
        self.values = values
        self.chart_radius = float(chart_radius)

    @classmethod
    def from_function(cls, fun, n, m, chart_radius=np.inf):
        """Sample fun(theta (N, m)) -> (N, d) on an n^m grid."""
        shape = (n,) * m
        nodes = grid_nodes(shape)
        vals = np.asarray(fun(nodes), dtype=float).reshape(len(nodes), -1)
        return cls(vals.reshape(shape + (vals.shape[1],)), chart_radius)

    @property
    def grid_shape(self):
        return self.values.shape[:-1]

    @property
    def dim(self):
        return self.values.shape[-1]

    def nodes(self):
        return grid_nodes(self.grid_shape)

    def node_values(self):
        return self.values.reshape(-1, self.dim)

    def __call__(self, p):
        p = np.atleast_2d(np.asarray(p, dtype=float))
        return interpolate_periodic(self.values, p)

    def sup_distance(self, other):
        """rho(c1, c2) = sup_p |c1(p) - c2(p)|, evaluated on the finer grid."""
        fine = self if np.prod(self.grid_shape) >= np.prod(other.grid_shape) else other
        nodes = fine.nodes()
        return float(np.max(np.linalg.norm(self(nodes) - other(nodes), axis=-1)))

    def check_chart(self):
        if np.isfinite(self.chart_radius):
            worst = float(np.max(np.linalg.norm(self.node_values(), axis=-1)))
            if worst >= self.chart_radius:
                raise HypothesisError(f"section leaves the chart: |c| = {worst:.4g} >= {self.chart_radius}")

    def graph(self, shift=0.0, n=None):
        """The graph of the section (optionally shifted) as a FiberedSet."""
        if n is None:
            nodes = self.nodes()
            vals = self.node_values()
            shape = self.grid_shape
        else:
            shape = (n,) * len(self.grid_shape)
            nodes = grid_nodes(shape)
            vals = self(nodes)
        return FiberedSet(nodes, (vals + shift)[:, None, :], grid_shape=shape)


def grid_nodes(shape):
    axes = [np.arange(n) * (TWO_PI / n) for n in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


def interpolate_periodic(values, p):
    """Multilinear periodic interpolation of grid data values (n_1..n_m, ...)."""
    shape = np.array(values.shape[:p.shape[1]])
    pos = wrap(p) / TWO_PI * shape
    base = np.floor(pos).astype(int)
    frac = pos - base
    out = 0.0
    m = p.shape[1]
    for corner in range(2 ** m):
        bits = [(corner >> j) & 1 for j in range(m)]
        weight = np.ones(len(p))
        idx = []
        for j, b in enumerate(bits):
            weight = weight * (frac[:, j] if b else 1.0 - frac[:, j])
            idx.append((base[:, j] + b) % shape[j])
        vals = values[tuple(idx)]
        out = out + weight.reshape((-1,) + (1,) * (vals.ndim - 1)) * vals
    return out


@dataclass
class FiberedSet:
    """Finite sample of a compact set fibered over the torus.

    base_grid: (n, m) base points; fibers: (n, k, d) array or list of
    (k_i, d) arrays.  With ``grid_shape`` set and equal fiber counts the
    fibers are interpolated between nodes, otherwise the nearest node is used.
    """

    base_grid: np.ndarray
    fibers: object
    grid_shape: tuple = None
    radius: float = np.inf

    def __post_init__(self):
        self.base_grid = np.atleast_2d(np.asarray(self.base_grid, dtype=float))
        fibers = [np.atleast_2d(np.asarray(f, dtype=float)) for f in self.fibers]
        if len(fibers) != len(self.base_grid):
            raise ConfigurationError("one fiber per base point is required")
        if any(len(f) == 0 for f in fibers):
            raise ConfigurationError("every fiber must be nonempty")
        self.fibers = fibers
        self._uniform = len({f.shape for f in fibers}) == 1
        if np.isfinite(self.radius):
            worst = max(float(np.max(np.linalg.norm(f, axis=1))) for f in fibers)
            if worst > self.radius:
                raise ConfigurationError(f"fiber point at |x|={worst:.4g} outside the bounding radius")

    @property
    def dim(self):
        return self.fibers[0].shape[1]

    def points(self):
        counts = [len(f) for f in self.fibers]
        return np.repeat(self.base_grid, counts, axis=0), np.vstack(self.fibers)

    def fiber_at(self, p):
        """Fiber sample over arbitrary base point(s): (k, d) or (n, k, d)."""
        p = np.asarray(p, dtype=float)
        single = p.ndim == 1
        p2 = np.atleast_2d(p)
        if self.grid_shape is not None and self._uniform:
            stack = np.stack(self.fibers).reshape(tuple(self.grid_shape) + self.fibers[0].shape)
            out = interpolate_periodic(stack, p2)
        else:
            near = np.argmin(base_metric(p2[:, None, :], self.base_grid[None]), axis=1)
            out = [self.fibers[i] for i in near]
            if self._uniform:
                out = np.stack(out)
        return out[0] if single else out

    def shifted(self, offset):
        return FiberedSet(self.base_grid, [f + offset for f in self.fibers], self.grid_shape)


# ------------------------------------------------------- section operator

def xi_map(c, t0, field, eps=None, cfg=None):
    """Section operator: push c forward along the flow for time t0.

    The new value at p is the fiber state reached at time t0 from
    (tau_{-t0} p, c(tau_{-t0} p)).
    """
    if not t0 > 0:
        raise ConfigurationError("t0 must be positive")
    nodes = c.nodes()
    start = advance(nodes, -t0, field.flow)
    try:
        x = trajectory(FlowPoint(start, c(start)), [t0], field, eps, cfg)[-1]
    except Escape as exc:
        raise ChartViolation(f"fiber trajectory escaped at t={exc.t_exit:.4g}") from exc
    out = Section(x.reshape(c.values.shape), c.chart_radius)
    out.check_chart()
    return out


@dataclass
class FixedPoint:
    section: Section
    alpha_hat: float
    increments: list
    iterates: list = field(repr=False, default_factory=list)

    def __iter__(self):
        # unpacks as (section, alpha_hat)
        return iter((self.section, self.alpha_hat))

    def graph(self, shift=0.0, n=None):
        return self.section.graph(shift, n)


def fixed_point_section(c0, t0, field, eps=None, cfg=None, tol=1e-9, max_iter=200,
                        warmup=1, ratio_floor=1e-7, keep_iterates=False):
    """Iterate the section operator to its fixed point.

    Stops when rho(c_{k+1}, c_k) <= tol.  alpha_hat is the largest ratio of
    successive increments seen after ``warmup`` ratios, counting only
    increments above ``ratio_floor`` (below it integration noise dominates).
    """
    if not tol > 0:
        raise ConfigurationError("tol must be positive")
    c = c0
    increments, ratios, iterates = [], [], [c0] if keep_iterates else []
    for _ in range(max_iter):
        nxt = xi_map(c, t0, field, eps, cfg)
        rho = nxt.sup_distance(c)
        if increments and increments[-1] > ratio_floor and rho > ratio_floor:
            ratios.append(rho / increments[-1])
        increments.append(rho)
        c = nxt
        if keep_iterates:
            iterates.append(c)
        counted = ratios[warmup:] if len(ratios) > warmup else ratios
        alpha_hat = max(counted) if counted else 0.0
        if len(ratios) > warmup and alpha_hat >= 1.0:
            raise ContractionError(f"increment ratio {alpha_hat:.4g} >= 1")
        if rho <= tol:
            return FixedPoint(c, alpha_hat, increments, iterates)
    raise ConvergenceError(f"no convergence after {max_iter} iterations (last increment {rho:.3g})")


# ------------------------------------------------------------------ tests

@dataclass
class AttractorReport:
    verdict: str
    convergence_curve: list
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "pass"


def _curve_verdict(values, tol, slack):
    final_ok = values[-1] <= tol
    floor = slack * tol
    monotone = all(b <= (1 + slack) * a + floor for a, b in zip(values, values[1:]))
    return final_ok and monotone, final_ok, monotone


def pullback_test(A, D, t_list, field, eps=None, cfg=None, tol=1e-3, slack=0.1, threads=None):
    """Push fibers of D from tau_{-t} p forward by t and compare with A at p.

    The curve records, for each t, the sup over the base grid of A of the
    Hausdorff distance between the pushed fiber and the fiber of A.  Pass
    when the final value is <= tol and the curve is non-increasing up to a
    relative slack (values below slack*tol count as converged).
    """
    t_list = np.asarray(t_list, dtype=float)
    if np.any(np.diff(t_list) <= 0):
        raise ConfigurationError("t_list must be strictly increasing")
    nodes = A.base_grid
    targets = [A.fiber_at(p) for p in nodes]

    def one_time(t):
        start = advance(nodes, -t, field.flow)
        fibers = [np.atleast_2d(f) for f in D.fiber_at(start)]
        counts = [len(f) for f in fibers]
        x0 = np.vstack(fibers)
        p0 = np.repeat(start, counts, axis=0)
        x = trajectory(FlowPoint(p0, x0), [t], field, eps, cfg)[-1]
        pieces = np.split(x, np.cumsum(counts)[:-1])
        vals = [max(fiber_distance(a, b).max(), fiber_distance(b, a).max())
                for a, b in zip(pieces, targets)]
        worst = int(np.argmax(vals))
        return vals[worst], worst

    try:
        results = parallel_map(one_time, list(t_list), threads)
    except Escape as exc:
        return AttractorReport("fail", [], {"escape_time": exc.t_exit})
    values = [r[0] for r in results]
    ok, final_ok, monotone = _curve_verdict(values, tol, slack)
    worst_t = int(np.argmax(values))
    diag = {"final": values[-1], "final_ok": final_ok, "monotone": monotone,
            "worst_base_point": nodes[results[-1][1]].tolist(), "worst_time": float(t_list[worst_t])}
    return AttractorReport("pass" if ok else "fail", list(zip(t_list.tolist(), values)), diag)


def _anchors(A, count, rng):
    """Random base points, a random fiber point above each, and unit directions."""
    m = A.base_grid.shape[1]
    p = rng.uniform(0.0, TWO_PI, size=(count, m))
    fibers = [np.atleast_2d(f) for f in A.fiber_at(p)]
    anchor = np.array([f[rng.integers(len(f))] for f in fibers])
    direction = rng.normal(size=(count, A.dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return p, anchor, direction


def _distances_along(A, p, x0, times, field, eps, cfg):
    traj = trajectory(FlowPoint(p, x0), times, field, eps, cfg)
    out = np.empty((len(times), len(p)))
    for i, t in enumerate(times):
        fib = A.fiber_at(advance(p, t, field.flow))
        fib = [np.atleast_2d(f) for f in fib]
        out[i] = [fiber_distance(traj[i, j:j + 1], fib[j])[0] for j in range(len(p))]
    return out


def lyapunov_test(A, W_radius, V_radii, field, eps=None, cfg=None, sample_count=64, horizon=20.0,
                  tol=1e-3, seed=0, n_checkpoints=41, bisect_steps=8):
    """Sampled attraction and stability test of A.

    Attraction: states drawn within W_radius of A must end within tol of
    the fiber of A at the horizon.  Stability: for each r in V_radii a
    radius r1 <= r is searched (bisection) such that states started within
    r1 stay within r up to the horizon.
    """
    if not W_radius > 0:
        raise ConfigurationError("W_radius must be positive")
    rng = np.random.default_rng(seed)
    times = np.linspace(0.0, horizon, n_checkpoints)
    diag = {"horizon": horizon, "tol": tol}
    try:
        p, anchor, direction = _anchors(A, sample_count, rng)
        r = W_radius * rng.uniform(size=sample_count) ** (1.0 / A.dim)
        dist = _distances_along(A, p, anchor + r[:, None] * direction, times, field, eps, cfg)
    except Escape as exc:
        return AttractorReport("fail", [], {"escape_time": exc.t_exit, **diag})
    curve = dist.max(axis=1)
    attraction = bool(curve[-1] <= tol)
    diag.update(attraction=attraction, terminal=float(curve[-1]),
                worst_sample=int(np.argmax(dist[-1])))

    # stability probes: half on the sphere of the trial radius, half inside
    probe_p, probe_anchor, probe_dir = _anchors(A, sample_count, rng)
    shrink = rng.uniform(size=sample_count)
    shrink[: sample_count // 2] = 1.0

    def stays(r1, r):
        x0 = probe_anchor + (r1 * shrink)[:, None] * probe_dir
        try:
            d = _distances_along(A, probe_p, x0, times, field, eps, cfg)
        except Escape:
            return False
        return bool(d.max() <= r)

    found = {}
    stability = True
    for r in V_radii:
        if stays(r, r):
            found[r] = r
            continue
        lo, hi = 0.0, r
        for _ in range(bisect_steps):
            mid = 0.5 * (lo + hi)
            if stays(mid, r):
                lo = mid
            else:
                hi = mid
        if lo == 0.0:
            stability = False
            diag["offending_radius"] = r
            break
        found[r] = lo
    diag.update(stability=stability, r1=found)
    verdict = "pass" if attraction and stability else "fail"
    return AttractorReport(verdict, list(zip(times.tolist(), curve.tolist())), diag)
