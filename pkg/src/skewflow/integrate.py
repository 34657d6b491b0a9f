"""Batched ODE integration with an escape radius.

The right-hand side has signature ``rhs(t, y) -> dy`` with ``y`` of shape
(n, d).  Two schemes are available: a fixed-step classical RK4 (used for
convergence-order studies and on precomputed node grids) and scipy's
embedded Runge-Kutta pairs with step control.
"""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConfigurationError, Escape, IntegrationError

_ADAPTIVE = {"rk45": "RK45", "dop853": "DOP853"}


@dataclass(frozen=True)
class FlowConfig:
    """Integrator settings.

    integrator: "rk45" (default, Dormand-Prince 5(4)), "dop853" or "rk4".
    max_step:   upper step bound; for "rk4" it is the step itself.
    """

    integrator: str = "rk45"
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = np.inf
    blowup_radius: float = 1e3

    def __post_init__(self):
        if self.integrator not in (*_ADAPTIVE, "rk4"):
            raise ConfigurationError(f"unknown integrator {self.integrator!r}")
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.blowup_radius > 0 and self.max_step > 0):
            raise ConfigurationError("tolerances, max_step and blowup_radius must be positive")
        if self.integrator == "rk4" and not np.isfinite(self.max_step):
            raise ConfigurationError("rk4 needs a finite max_step")


def rk4_step(rhs, t, y, h):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_escape(y, t, radius):
    norms = np.linalg.norm(y, axis=-1)
    if not np.all(np.isfinite(norms)) or np.any(norms > radius):
        raise Escape(t)


def integrate(rhs, y0, t0, times, cfg=None):
    """Integrate from t0 and return the states at each entry of ``times``.

    ``times`` must be monotone in the direction of integration (either all
    >= t0 increasing, or all <= t0 decreasing).  Returns shape
    (len(times), n, d).  Raises Escape when a row leaves the blowup ball.
    """
    cfg = cfg or FlowConfig()
    y0 = np.asarray(y0, dtype=float)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    out = np.empty((len(times),) + y0.shape)
    if len(times) == 0:
        return out
    direction = np.sign(times[-1] - t0) or 1.0
    span = np.concatenate([[t0], times])
    if np.any(direction * np.diff(span) < 0):
        raise ConfigurationError("output times must be monotone in the integration direction")
    _check_escape(y0, t0, cfg.blowup_radius)

    if cfg.integrator == "rk4":
        y, t = y0, t0
        for i, t_next in enumerate(times):
            n_steps = int(np.ceil(abs(t_next - t) / cfg.max_step - 1e-12))
            if n_steps > 0:
                h = (t_next - t) / n_steps
                for j in range(n_steps):
                    y = rk4_step(rhs, t + j * h, y, h)
                    _check_escape(y, t + (j + 1) * h, cfg.blowup_radius)
            y, t = y, t_next
            out[i] = y
        return out

    shape = y0.shape
    if times[-1] == t0:
        out[:] = y0
        return out

    def flat_rhs(t, yf):
        return rhs(t, yf.reshape(shape)).ravel()

    def blowup(t, yf):
        return cfg.blowup_radius - np.max(np.linalg.norm(yf.reshape(shape), axis=-1))

    blowup.terminal = True
    blowup.direction = -1
    sol = solve_ivp(
        flat_rhs, (t0, times[-1]), y0.ravel(), method=_ADAPTIVE[cfg.integrator],
        t_eval=times, rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step,
        events=blowup,
    )
    if sol.status == 1:
        raise Escape(sol.t_events[0][0])
    if sol.status != 0:
        raise IntegrationError(sol.message)
    out[:] = sol.y.T.reshape((len(times),) + shape)
    return out
