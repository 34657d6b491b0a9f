"""Skew-product flows generated by vector fields over a torus rotation.

A point of the product space is a ``FlowPoint(p, x)``: a base point p on
the torus and a fiber state x in R^d.  ``evolve`` advances it in slow time
t (optionally scaled by |eps|), ``fast_evolve`` in fast time s = |eps| t.
"""
from dataclasses import dataclass

import numpy as np

from .base_flow import BaseFlow, advance, base_metric
from .errors import ConfigurationError, Escape, EvaluationError
from .integrate import FlowConfig, integrate


@dataclass
class FlowPoint:
    """Base point(s) p with fiber state(s) x; batched as (n, m) and (n, d)."""

    p: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        if not np.all(np.isfinite(self.x)):
            raise EvaluationError("fiber state is not finite")


class VectorField:
    """Family f(p, x, eps) on torus x R^d with f(p, 0, eps) = 0.

    ``func(theta, x, eps)`` must accept batches theta (n, m), x (n, d) and
    return (n, d).  ``jacobian(theta, x, eps)`` returns (n, d, d); when it
    is omitted a five-point central difference is used.
    """

    def __init__(self, dim, func, flow, jacobian=None, lipschitz_hint=None, name=""):
        if not isinstance(flow, BaseFlow):
            raise ConfigurationError("flow must be a BaseFlow")
        self.dim = int(dim)
        self.func = func
        self.flow = flow
        self._jacobian = jacobian
        self.lipschitz_hint = lipschitz_hint
        self.name = name

    def __repr__(self):
        return f"VectorField({self.name or 'anonymous'}, d={self.dim}, m={self.flow.dim})"

    def _batch(self, theta, x):
        theta = np.asarray(theta, dtype=float)
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x2 = np.atleast_2d(x)
        th2 = np.broadcast_to(np.atleast_2d(theta), (x2.shape[0], self.flow.dim))
        if x2.shape[1] != self.dim:
            raise ConfigurationError(f"state of shape {x.shape} does not match d={self.dim}")
        return th2, x2, single

    def eval(self, theta, x, eps=0.0):
        th, xx, single = self._batch(theta, x)
        out = np.asarray(self.func(th, xx, eps), dtype=float)
        return out[0] if single else out

    __call__ = eval

    def jacobian(self, theta, x, eps=0.0):
        th, xx, single = self._batch(theta, x)
        if self._jacobian is not None:
            jac = np.asarray(self._jacobian(th, xx, eps), dtype=float)
        else:
            jac = fd_jacobian(lambda y: self.func(th, y, eps), xx)
        return jac[0] if single else jac

    def linear_part(self, theta, eps=0.0):
        """l_eps(p) = D_x f(p, 0, eps), shape (n, d, d)."""
        theta = np.atleast_2d(np.asarray(theta, dtype=float))
        return self.jacobian(theta, np.zeros((theta.shape[0], self.dim)), eps)

    def nonlinear_part(self, theta, x, eps=0.0):
        """n_eps(p, x) = f(p, x, eps) - l_eps(p) x."""
        th, xx, single = self._batch(theta, x)
        lin = self.linear_part(th, eps)
        out = self.func(th, xx, eps) - np.einsum("nij,nj->ni", lin, xx)
        return out[0] if single else out


def fd_jacobian(fun, x):
    """Five-point central-difference Jacobian of a batched map, step 1e-5(1+|x|)."""
    n, d = x.shape
    h = 1e-5 * (1.0 + np.linalg.norm(x, axis=1))
    jac = np.empty((n, d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        dx = h[:, None] * e
        df = (-fun(x + 2 * dx) + 8 * fun(x + dx) - 8 * fun(x - dx) + fun(x - 2 * dx))
        jac[:, :, j] = df / (12.0 * h[:, None])
    return jac


def _rhs(field, p, eps, fast):
    p = np.atleast_2d(p)
    if fast:
        if eps is None or eps == 0:
            raise ConfigurationError("fast time needs eps != 0")
        speed = 1.0 / abs(eps)

        def rhs(s, x):
            return field.func(advance(p, s * speed, field.flow), x, eps)
        return rhs

    scale = 1.0 if eps is None else abs(eps)
    eps_val = 0.0 if eps is None else eps

    def rhs(t, x):
        return scale * field.func(advance(p, t, field.flow), x, eps_val)
    return rhs


def _run(z, times, field, eps, cfg, fast):
    p = np.atleast_2d(z.p)
    x = np.atleast_2d(z.x)
    p = np.broadcast_to(p, (x.shape[0], p.shape[1]))
    traj = integrate(_rhs(field, p, eps, fast), x, 0.0, times, cfg)
    return p, traj


def evolve(z, t, field, eps=None, cfg=None):
    """Advance (p, x) by slow time t.

    With ``eps=None`` this solves x' = f(tau_t p, x, 0); otherwise
    x' = |eps| f(tau_t p, x, eps).  The base component is advance(p, t)
    exactly.  Raises Escape if |x| exceeds the blowup radius.
    """
    if not np.isfinite(t):
        raise ConfigurationError("t must be finite")
    p, traj = _run(z, [t], field, eps, cfg, fast=False)
    x = traj[-1]
    single = np.ndim(z.x) == 1
    p_new = advance(p, t, field.flow)
    return FlowPoint(p_new[0], x[0]) if single else FlowPoint(p_new, x)


def fast_evolve(z, s, field, eps, cfg=None):
    """Advance (p, x) by fast time s: dx/ds = f(tau_{s/|eps|} p, x, eps)."""
    if eps is None or eps == 0:
        raise ConfigurationError("fast_evolve needs eps != 0")
    p, traj = _run(z, [s], field, eps, cfg, fast=True)
    x = traj[-1]
    single = np.ndim(z.x) == 1
    p_new = advance(p, s / abs(eps), field.flow)
    return FlowPoint(p_new[0], x[0]) if single else FlowPoint(p_new, x)


def trajectory(z, times, field, eps=None, cfg=None, fast=False):
    """Fiber states at each of ``times`` (monotone from 0); shape (k, n, d)."""
    _, traj = _run(z, times, field, eps, cfg, fast)
    return traj


def product_distance(z1, z2):
    """d(z1, z2) = base distance + Euclidean fiber distance."""
    return base_metric(z1.p, z2.p) + np.linalg.norm(np.asarray(z1.x) - np.asarray(z2.x), axis=-1)


def cocycle_defect(z, s, t, field, eps=None, cfg=None, fast=False):
    """Distance between phi_t(phi_s(z)) and phi_{s+t}(z).

    Returns nan (not comparable) when either leg escapes.
    """
    step = fast_evolve if fast else evolve
    args = (field, eps, cfg)
    try:
        two_legs = step(step(z, s, *args), t, *args)
        one_leg = step(z, s + t, *args)
    except Escape:
        return np.nan
    return float(np.max(product_distance(two_legs, one_leg)))
