"""Reduction constants, exponential tracking by on-manifold solutions, and
the transfer of attraction from the reduced flow to the full system.
"""
from dataclasses import dataclass, field

import numpy as np

from ..attractor import AttractorReport
from ..errors import ConfigurationError, PreconditionError
from .chart import graph_transform_h, omega_modulus


@dataclass
class ReductionConstants:
    alpha: float
    beta: float
    gamma: float
    k: float
    Delta: float
    delta: float
    omega_of_Delta: float

    def __post_init__(self):
        if not 0 < self.gamma < self.beta - self.alpha:
            raise ConfigurationError("need 0 < gamma < beta - alpha")

    @property
    def admissibility_bound(self):
        return min(2 * self.gamma, self.beta - self.alpha - self.gamma, 4 * self.k ** 2)

    @property
    def admissible(self):
        return 4 * self.k ** 2 * self.omega_of_Delta <= self.admissibility_bound


def select_constants(frame, blocked, gamma=0.1, delta=0.25, shrink=0.8, min_Delta=1e-6,
                     chart_kwargs=None):
    """Choose Delta and build the chart so that 4 k^2 omega(2 Delta) <= min{2g, b-a-g, 4k^2}.

    Delta starts at delta/2 and shrinks by ``shrink`` until the inequality
    holds for the nonlinearity alone; the chart is then built and the
    inequality rechecked with d_u h included (shrinking further if needed).
    Returns (constants, chart).
    """
    alpha = frame.constants["alpha"]
    beta = frame.constants["beta"]
    k = frame.constants["k"]
    chart_kwargs = chart_kwargs or {}
    Delta = delta / 2.0
    bound = min(2 * gamma, beta - alpha - gamma, 4 * k ** 2)
    while 4 * k ** 2 * omega_modulus(blocked, None, 2 * Delta) > bound:
        Delta *= shrink
        if Delta < min_Delta:
            raise ConfigurationError("no admissible Delta found")
    while True:
        chart = graph_transform_h(frame, blocked, Delta, **chart_kwargs)
        omega = omega_modulus(blocked, chart, 2 * Delta)
        if 4 * k ** 2 * omega <= bound:
            return ReductionConstants(alpha, beta, gamma, k, Delta, delta, omega), chart
        Delta *= shrink
        if Delta < min_Delta:
            raise ConfigurationError("no admissible Delta found")


# ------------------------------------------------------------ integration

def _rk4_nodes(rhs, i0, n_steps, y0, direction=1):
    """RK4 with step 2h on frame nodes; returns states at nodes i0 + 2*direction*k."""
    out = np.empty((n_steps + 1,) + y0.shape)
    out[0] = y0
    y = y0
    j = direction
    for k in range(n_steps):
        i = i0 + 2 * j * k
        k1 = rhs(i, y)
        k2 = rhs(i + j, y + 0.5 * k1)
        k3 = rhs(i + j, y + 0.5 * k2)
        k4 = rhs(i + 2 * j, y + k3)
        y = y + (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        out[k + 1] = y
    return out


def full_system(frame, blocked, direction=1):
    """Increment function H * f for the blocked system, y of shape (n, d)."""
    H = 2.0 * frame.step * direction
    e = frame.e

    def rhs(i, y):
        g1, g2 = blocked.at_nodes(np.array([i]), y[None, :, :e], y[None, :, e:])
        return H * (y @ frame.m[i].T + np.concatenate([g1[0], g2[0]], axis=-1))
    return rhs


def reduced_system(frame, blocked, chart, direction=1):
    """Increment function H * f for u' = a u + g1(u, h(s, u)), u of shape (n, 1)."""
    H = 2.0 * frame.step * direction

    def rhs(i, u):
        v = chart.at([i], u[None, :, 0])
        g1, _ = blocked.at_nodes(np.array([i]), u[None], v)
        return H * (u @ frame.a[i].T + g1[0])
    return rhs


def integrate_full(frame, blocked, s0, s1, y0):
    """States of the blocked system at every other node between s0 and s1."""
    i0, i1 = frame.index(s0), frame.index(s1)
    steps = abs(i1 - i0) // 2
    direction = 1 if i1 >= i0 else -1
    traj = _rk4_nodes(full_system(frame, blocked, direction), i0, steps, np.atleast_2d(y0), direction)
    s = frame.s_grid[i0 + 2 * direction * np.arange(steps + 1)]
    return s, traj


def integrate_reduced(frame, blocked, chart, s0, s1, u0):
    i0, i1 = frame.index(s0), frame.index(s1)
    steps = abs(i1 - i0) // 2
    direction = 1 if i1 >= i0 else -1
    traj = _rk4_nodes(reduced_system(frame, blocked, chart, direction), i0, steps,
                      np.atleast_2d(u0).reshape(-1, 1), direction)
    s = frame.s_grid[i0 + 2 * direction * np.arange(steps + 1)]
    return s, traj


# --------------------------------------------------------------- tracking

@dataclass
class TrackingReport:
    times: np.ndarray
    deviations: np.ndarray
    slope: float
    prefactor: float
    bound_prefactor: float
    bound_ok: bool
    slope_ok: bool
    exited: bool
    shadow_u0: float
    shadow_drift: float
    constants: ReductionConstants = None
    u: np.ndarray = field(default=None, repr=False)
    v: np.ndarray = field(default=None, repr=False)
    shadow: np.ndarray = field(default=None, repr=False)

    @property
    def passed(self):
        return self.bound_ok and self.slope_ok and not self.exited


def _fit_tail(times, devs, start, floor=1e-13):
    sel = (times >= start) & (devs > floor)
    if sel.sum() < 3:
        return np.nan, np.nan
    slope, intercept = np.polyfit(times[sel], np.log(devs[sel]), 1)
    return float(slope), float(np.exp(intercept))


def asymptotic_phase(z0, frame, chart, blocked, constants, S=15.0, s0=0.0, match="right",
                     S_check=None, slack=0.1, slope_slack=0.05, floor=1e-10):
    """Track a full-system solution by a solution on the chart.

    The shadow solves the reduced equation and is matched to u at the
    right endpoint s0 + S (``match="left"`` matches at s0 instead).  The
    report compares dev(s) = |u - u~| + |v - h(s, u~)| with
    2 k |v0 - h(s0, u0)| e^{-(beta - gamma)(s - s0)}; ``floor`` absorbs the
    chart's own numerical error.
    """
    e = frame.e
    z0 = np.asarray(z0, dtype=float)
    u0, v0 = z0[:e], z0[e:]
    D = constants.Delta
    if np.max(np.abs(z0)) > D:
        raise PreconditionError("initial state outside the Delta box")
    s_end = s0 + S
    times, traj = integrate_full(frame, blocked, s0, s_end, z0)
    y = traj[:, 0]
    inside = np.all(np.abs(y) <= D, axis=1)
    exited = not inside.all()
    if exited:
        cut = int(np.argmin(inside))
        times, y = times[:cut], y[:cut]
        s_end = times[-1]
    u, v = y[:, :e], y[:, e:]
    if match == "right":
        st, ut = integrate_reduced(frame, blocked, chart, s_end, s0, u[-1])
        shadow = ut[::-1, 0]
    elif match == "left":
        st, ut = integrate_reduced(frame, blocked, chart, s0, s_end, u0)
        shadow = ut[:, 0]
    else:
        raise ConfigurationError("match must be 'right' or 'left'")
    idx = frame.index(times)
    h_sh = np.stack([chart.at([i], sh[None])[0, 0] for i, sh in zip(idx, shadow)])
    dev = np.linalg.norm(u - shadow, axis=1) + np.linalg.norm(v - h_sh, axis=1)

    drift = np.nan
    if S_check is not None and s0 + S_check <= frame.s_grid[-1]:
        _, yc = integrate_full(frame, blocked, s0, s0 + S_check, z0)
        _, uc = integrate_reduced(frame, blocked, chart, s0 + S_check, s0, yc[-1, 0, :e])
        drift = float(np.max(np.abs(uc[-1, 0] - shadow[0])))

    h0 = chart.at([frame.index(s0)], u0[None])[0, 0]
    bound_pref = 2.0 * constants.k * float(np.linalg.norm(v0 - h0))
    rate = constants.beta - constants.gamma
    bound = bound_pref * np.exp(-rate * (times - s0))
    bound_ok = bool(np.all(dev <= (1.0 + slack) * bound + floor))
    slope, pref = _fit_tail(times - s0, dev, S / 4.0)
    slope_ok = bool(np.isfinite(slope) and slope <= -rate + slope_slack)
    return TrackingReport(times, dev, slope, pref, bound_pref, bound_ok, slope_ok, exited,
                          float(shadow[0, 0]), drift, constants, u, v, shadow)


# ------------------------------------------------------------------ Pliss

def lift(frame, chart, i, u):
    """Graph map u -> sigma(s_i) (u, h(s_i, u)) into the original coordinates."""
    u = np.atleast_2d(u)
    v = chart.at([i], u[None, :, 0])[0]
    return np.concatenate([u, v], axis=1) @ frame.sigma[i].T


def pliss_check(frame, chart, blocked, constants, A0=None, sample_count=100, horizon=40.0,
                s0=0.0, tol=1e-3, containment_tol=1e-4, seed=0):
    """Attraction of the lifted set in the full system, given attraction in the reduced flow.

    A0 is a FiberedSet of center coordinates over the torus (default: the
    zero section).  Steps:

    1. precondition: A0 inside the Delta/2 box and attracting under the
       reduced flow over [s0, s0 + horizon];
    2. containment: trajectories started at the frame start and staying in
       the Delta box are within ``containment_tol`` of the graph on
       [s0, s0 + horizon];
    3. reduction: states drawn in the Delta/2 box around the lift of A0 at
       s0 end within ``tol`` of the lifted set at s0 + horizon.
    """
    rng = np.random.default_rng(seed)
    e = frame.e
    half = constants.Delta / 2.0
    i0 = frame.index(s0)
    i_end = frame.index(s0 + horizon)
    nodes = np.arange(i0, i_end + 1, 2)

    def a0_at(i):
        if A0 is None:
            return np.zeros((1, e))
        return np.atleast_2d(A0.fiber_at(frame.base_points[i]))

    if max(np.max(np.abs(a0_at(i))) for i in nodes[::50]) > half:
        raise PreconditionError("A0 is not inside the Delta/2 box")

    def dist_to_a0(i, u):
        fib = a0_at(i)
        return np.min(np.linalg.norm(u[:, None, :] - fib[None], axis=-1), axis=1)

    diag = {"Delta": constants.Delta, "horizon": horizon, "tol": tol}

    # reduced flow
    anchor = a0_at(i0)[rng.integers(len(a0_at(i0)), size=sample_count)]
    ur0 = anchor + rng.uniform(-half, half, size=(sample_count, e))
    _, ur = integrate_reduced(frame, blocked, chart, s0, s0 + horizon, ur0)
    red_curve = np.array([dist_to_a0(i, ur[k]).max() for k, i in enumerate(nodes)])
    red_attract = bool(red_curve[-1] <= tol)
    red_stable = bool(red_curve.max() <= half * (1.0 + 1e-6))
    diag.update(reduced_terminal=float(red_curve[-1]), reduced_stable=red_stable,
                reduced_attracting=red_attract)

    # containment: start at the frame start, keep trajectories that stay in the box
    ys = rng.uniform(-half, half, size=(sample_count, frame.d))
    first = i0 % 2
    _, yc = integrate_full(frame, blocked, frame.s_grid[first], s0 + horizon, ys)
    bounded = np.all(np.abs(yc) <= constants.Delta, axis=(0, 2))
    gaps = []
    for k in range((i0 - first) // 2, yc.shape[0]):
        i = first + 2 * k
        uk = yc[k, bounded, :e]
        if len(uk) == 0:
            break
        vk = chart.at([i], uk[None, :, 0])[0]
        gaps.append(np.max(np.linalg.norm((yc[k, bounded, e:] - vk) @ frame.sigma[i][:, e:].T, axis=1)))
    containment = float(max(gaps)) if gaps else np.nan
    diag.update(containment=containment, bounded_count=int(bounded.sum()),
                containment_ok=bool(gaps and containment <= containment_tol))

    # reduction: full-space starts around the lifted set
    u_start = anchor + rng.uniform(-half, half, size=(sample_count, e))
    v_start = chart.at([i0], anchor[None, :, 0])[0] + rng.uniform(-half, half, size=(sample_count, frame.d - e))
    _, yf = integrate_full(frame, blocked, s0, s0 + horizon, np.hstack([u_start, v_start]))
    curve = []
    for k, i in enumerate(nodes):
        x = yf[k] @ frame.sigma[i].T
        lifted = lift(frame, chart, i, a0_at(i))
        curve.append(float(np.min(np.linalg.norm(x[:, None] - lifted[None], axis=-1), axis=1).max()))
    curve = np.array(curve)
    diag.update(terminal=float(curve[-1]), initial=float(curve[0]))
    times = frame.s_grid[nodes]

    if not (red_attract and red_stable):
        verdict = "precondition-unmet"
    else:
        verdict = "pass" if curve[-1] <= tol and diag["containment_ok"] else "fail"
    report = AttractorReport(verdict, list(zip(times.tolist(), curve.tolist())), diag)
    report.reduced_curve = list(zip(times.tolist(), red_curve.tolist()))
    return report
