"""Named benchmark systems.

All benchmarks with d = 2 live on the torus with frequencies (1, sqrt 2)
and share the linear part

    l(theta) = [[0, cos theta1], [cos theta2, -1]],

whose torus average is diag(0, -1).  The off-diagonal forcing terms have
distinct frequencies, so their products average to zero as well and the
center exponent stays near 0 for small eps.
"""
import numpy as np

from .base_flow import BaseFlow
from .cocycle import VectorField
from .errors import ConfigurationError

SQRT2 = np.sqrt(2.0)
TORUS2 = BaseFlow((1.0, SQRT2))
CIRCLE = BaseFlow((SQRT2,))


def b1_matrix(theta):
    theta = np.atleast_2d(theta)
    n = theta.shape[0]
    lin = np.zeros((n, 2, 2))
    lin[:, 0, 1] = np.cos(theta[:, 0])
    lin[:, 1, 0] = np.cos(theta[:, 1])
    lin[:, 1, 1] = -1.0
    return lin


def _linear_field(matrix_fn, flow, name, dim=2):
    def func(theta, x, eps):
        return np.einsum("nij,nj->ni", matrix_fn(theta, eps), x)

    def jac(theta, x, eps):
        return matrix_fn(theta, eps)

    return VectorField(dim, func, flow, jacobian=jac, name=name)


def b1():
    return _linear_field(lambda th, eps: b1_matrix(th), TORUS2, "B1")


def _quadratic(x):
    # n(x) = (-x1 x2, x1^2): the slow manifold is x2 ~ x1^2 and u' ~ -u^3 on it
    return np.stack([-x[:, 0] * x[:, 1], x[:, 0] ** 2], axis=1)


def _quadratic_jac(x):
    jac = np.zeros((x.shape[0], 2, 2))
    jac[:, 0, 0] = -x[:, 1]
    jac[:, 0, 1] = -x[:, 0]
    jac[:, 1, 0] = 2.0 * x[:, 0]
    return jac


def _b2_like(matrix_fn, name):
    def func(theta, x, eps):
        return np.einsum("nij,nj->ni", matrix_fn(theta, eps), x) + _quadratic(x)

    def jac(theta, x, eps):
        return matrix_fn(theta, eps) + _quadratic_jac(x)

    return VectorField(2, func, TORUS2, jacobian=jac, name=name)


def b2():
    return _b2_like(lambda th, eps: b1_matrix(th), "B2")


def b2_damped(rate=4.0):
    """B2 with an extra center damping -rate*|eps| (exponential reduced flow)."""
    def matrix(theta, eps):
        lin = b1_matrix(theta)
        lin[:, 0, 0] -= rate * abs(eps)
        return lin
    return _b2_like(matrix, "B2-damped")


def constant_diag01():
    def matrix(theta, eps):
        n = np.atleast_2d(theta).shape[0]
        return np.broadcast_to(np.diag([0.0, -1.0]), (n, 2, 2)).copy()
    return _linear_field(matrix, TORUS2, "constant-diag01")


def scalar_decay():
    """x' = -x on the circle (unforced)."""
    return _linear_field(lambda th, eps: -np.ones((np.atleast_2d(th).shape[0], 1, 1)),
                         CIRCLE, "scalar-decay", dim=1)


def b1_scalar():
    """x' = -x + cos theta, theta' = sqrt 2.

    Affine rather than linear: its bounded solution is the graph of
    a(theta) = (cos theta + sqrt2 sin theta) / 3.
    """
    def func(theta, x, eps):
        return -x + np.cos(theta[:, :1])

    def jac(theta, x, eps):
        return -np.ones((x.shape[0], 1, 1))

    return VectorField(1, func, CIRCLE, jacobian=jac, name="B1-scalar")


def scalar_section_exact(theta, omega=SQRT2):
    """Closed-form invariant graph of x' = -x + cos theta, theta' = omega."""
    theta = np.asarray(theta, dtype=float)
    return (np.cos(theta) + omega * np.sin(theta)) / (1.0 + omega ** 2)


def zero_field(dim=1, flow=CIRCLE):
    return VectorField(dim, lambda th, x, eps: np.zeros_like(x), flow,
                       jacobian=lambda th, x, eps: np.zeros((x.shape[0], dim, dim)),
                       name="zero")


REGISTRY = {
    "B1": b1,
    "B2": b2,
    "B2-damped": b2_damped,
    "B1-scalar": b1_scalar,
    "constant-diag01": constant_diag01,
    "scalar-decay": scalar_decay,
    "zero": zero_field,
}


def get(name):
    try:
        return REGISTRY[name]()
    except KeyError:
        raise ConfigurationError(f"unknown system {name!r}; known: {sorted(REGISTRY)}") from None
