"""Blocked nonlinear system and the integral-manifold chart v = h(s, u).

In frame coordinates x = sigma(s) (u, v) the fast-time system reads

    u' = a(s) u + g1(s, u, v),   v' = b(s) v + g2(s, u, v),

with g = sigma^{-1} n(sigma y).  The chart h is the fixed point of the
backward variation-of-constants operator, evaluated here by a
semi-Lagrangian sweep on the frame's node grid.  The u-grid is a
Chebyshev-Lobatto grid, so derivatives in u are spectrally accurate.
"""
from dataclasses import dataclass, field

import numpy as np

from ..errors import ChartError, ConfigurationError, GapTooSmallError


# ------------------------------------------------------------ Chebyshev

def lobatto_nodes(n_nodes, radius):
    """Chebyshev-Lobatto nodes on [-radius, radius], ascending."""
    j = np.arange(n_nodes)
    return -radius * np.cos(np.pi * j / (n_nodes - 1))


def _bary_weights(n_nodes):
    w = (-1.0) ** np.arange(n_nodes)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def diff_matrix(nodes):
    """Differentiation matrix of the polynomial interpolant on ``nodes``."""
    w = _bary_weights(len(nodes))
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def interp_matrix(nodes, query):
    """Barycentric interpolation matrix, shape query.shape + (n_nodes,)."""
    w = _bary_weights(len(nodes))
    q = np.asarray(query, dtype=float)[..., None]
    diff = q - nodes
    hit = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = w / diff
        mat = terms / terms.sum(axis=-1, keepdims=True)
    rows = hit.any(axis=-1)
    if np.any(rows):
        mat[rows] = hit[rows].astype(float)
    return mat


# ------------------------------------------------- blocked nonlinearity

class BlockedNonlinearity:
    """g(s, y) = sigma^{-1}(s) n(tau_{s/|eps|} p, sigma(s) y) split as (g1, g2)."""

    def __init__(self, frame, field, eps=None):
        self.frame = frame
        self.field = field
        self.eps = frame.eps if eps is None else eps
        self.e = frame.e

    def at_nodes(self, idx, u, v):
        """Evaluate at node indices idx (n,) and states u (n, q, e), v (n, q, d-e)."""
        fr = self.frame
        idx = np.atleast_1d(idx)
        y = np.concatenate([u, v], axis=-1)
        x = np.einsum("nij,nqj->nqi", fr.sigma[idx], y)
        n, q, d = x.shape
        pts = np.broadcast_to(fr.base_points[idx][:, None, :], (n, q, fr.base_points.shape[1]))
        fx = self.field.func(pts.reshape(n * q, -1), x.reshape(n * q, d), self.eps).reshape(n, q, d)
        nl = fx - np.einsum("nij,nqj->nqi", fr.l[idx], x)
        g = np.einsum("nij,nqj->nqi", fr.sigma_inv[idx], nl)
        return g[..., :self.e], g[..., self.e:]

    def g(self, s, u, v):
        """Evaluate at an arbitrary time s (sigma by Hermite interpolation)."""
        from ..base_flow import advance
        fr = self.frame
        u = np.atleast_2d(u)
        v = np.atleast_2d(v)
        sig = fr.sigma_at(s)
        y = np.concatenate([u, v], axis=-1)
        x = y @ sig.T
        p = advance(fr.p, s / abs(fr.eps), fr.family.flow)
        pts = np.broadcast_to(p, (len(x), len(p)))
        nl = self.field.func(pts, x, self.eps) - x @ fr.family.matrix(p[None], fr.eps)[0].T
        g = np.linalg.solve(sig, nl.T).T
        return g[:, :self.e], g[:, self.e:]

    def g1(self, s, u, v):
        return self.g(s, u, v)[0]

    def g2(self, s, u, v):
        return self.g(s, u, v)[1]

    def jacobian_blocks(self, idx, u, v):
        """(du g1, dv g1, du g2, dv g2) at nodes, each of shape (n, q, ., .)."""
        fr = self.frame
        e = self.e
        y = np.concatenate([u, v], axis=-1)
        x = np.einsum("nij,nqj->nqi", fr.sigma[idx], y)
        n, q, d = x.shape
        pts = np.broadcast_to(fr.base_points[idx][:, None, :], (n, q, fr.base_points.shape[1]))
        jf = self.field.jacobian(pts.reshape(n * q, -1), x.reshape(n * q, d), self.eps).reshape(n, q, d, d)
        jn = jf - fr.l[idx][:, None]
        jg = np.einsum("nij,nqjk,nkl->nqil", fr.sigma_inv[idx], jn, fr.sigma[idx])
        return jg[..., :e, :e], jg[..., :e, e:], jg[..., e:, :e], jg[..., e:, e:]


def blocked_nonlinearity(frame, field, eps=None):
    """Evaluators g1(s, u, v), g2(s, u, v) of the blocked nonlinearity."""
    blocked = BlockedNonlinearity(frame, field, eps)
    return blocked.g1, blocked.g2


# ---------------------------------------------------------------- chart

@dataclass
class ManifoldChart:
    """Chart values h(s_i, u_j) on frame nodes times a Lobatto u-grid."""

    s_grid: np.ndarray
    u_grid: np.ndarray
    values: np.ndarray  # (n_s, n_u, d - e)
    Delta: float
    window: float
    valid_from: int
    history: list = field(default_factory=list)
    D: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.D is None:
            self.D = diff_matrix(self.u_grid)

    @property
    def radius(self):
        return float(self.u_grid[-1])

    @property
    def valid_s(self):
        return self.s_grid[self.valid_from:]

    def at(self, idx, u):
        """h at node indices idx (n,) and points u (n, q) -> (n, q, d-e)."""
        mat = interp_matrix(self.u_grid, u)
        return np.einsum("nqj,njk->nqk", mat, self.values[np.atleast_1d(idx)])

    def du(self, idx, u):
        """d h / d u at node indices and points, shape (n, q, d-e)."""
        mat = interp_matrix(self.u_grid, u)
        dvals = np.einsum("ij,njk->nik", self.D, self.values[np.atleast_1d(idx)])
        return np.einsum("nqj,njk->nqk", mat, dvals)

    def du_nodes(self, idx=slice(None)):
        return np.einsum("ij,njk->nik", self.D, self.values[idx])


def _taylor(vals, dvals, d2vals, d3vals, delta):
    dl = delta[..., None]
    return vals + dl * (dvals + 0.5 * dl * (d2vals + dl / 3.0 * d3vals))


def graph_transform_h(frame, blocked, Delta, S_w=None, tol=1e-8, max_iter=60, n_u=33, radius=None):
    """Integral-manifold chart by iterating the backward variation-of-constants map.

    Each iterate h_{k+1}(s, u) is built by a sweep forward in s: from
    every grid point (s_{i+2}, u_j) the u-characteristic of the k-th
    iterate is traced back one step of length 2*step to its foot u*, and
    the v-equation v' = b v + g2(u, h_k(u)) is integrated forward from
    h_{k+1}(s_i, u*).  The sweep starts from h = 0 at the first node, so
    values are accurate from ``S_w`` after the frame start on.

    The u-grid covers |u| <= radius (default 2*Delta); feet outside it
    are clamped to the edge.  Only a one-dimensional center direction is
    supported.
    """
    if frame.e != 1:
        raise ConfigurationError("graph_transform_h supports a one-dimensional center direction only")
    alpha = frame.constants.get("alpha", 0.25)
    beta = frame.constants.get("beta", 0.5)
    if not beta - alpha > 0:
        raise ConfigurationError("no spectral gap")
    S_w = 40.0 / (beta - alpha) if S_w is None else S_w
    span = frame.s_grid[-1] - frame.s_grid[0]
    if span <= S_w:
        raise ConfigurationError(f"frame span {span:.4g} shorter than the window {S_w:.4g}")
    R = 2.0 * Delta if radius is None else radius
    h = frame.step
    H = 2.0 * h
    N = len(frame.s_grid)
    dv = frame.d - 1
    ug = lobatto_nodes(n_u, R)
    D = diff_matrix(ug)
    D2 = D @ D
    D3 = D2 @ D
    j0 = int(np.argmin(np.abs(ug)))
    a = frame.a[:, 0, 0]
    b = frame.b
    eye = np.eye(n_u)

    chains = []
    for c in (0, 1):
        I = np.arange(c, N - 2, 2)
        # homogeneous RK4 propagator of v' = b v over one step
        A = np.broadcast_to(np.eye(dv), (len(I), dv, dv))
        W1 = b[I] @ A
        W2 = b[I + 1] @ (A + 0.5 * H * W1)
        W3 = b[I + 1] @ (A + 0.5 * H * W2)
        W4 = b[I + 2] @ (A + H * W3)
        chains.append((I, A + H / 6.0 * (W1 + 2 * W2 + 2 * W3 + W4)))

    Hk = np.zeros((N, n_u, dv))
    history = []
    for _ in range(max_iter):
        DH = np.einsum("ij,njk->nik", D, Hk)
        D2H = np.einsum("ij,njk->nik", D2, Hk)
        D3H = np.einsum("ij,njk->nik", D3, Hk)

        def rhs(idx, u):
            v = _taylor(Hk[idx], DH[idx], D2H[idx], D3H[idx], u - ug)
            g1, g2 = blocked.at_nodes(idx, u[..., None], v)
            return a[idx][:, None] * u + g1[..., 0], g2

        Hn = np.zeros_like(Hk)
        for I, A in chains:
            U = np.broadcast_to(ug, (len(I), n_u))
            k1, _ = rhs(I + 2, U)
            k2, _ = rhs(I + 1, U - 0.5 * H * k1)
            k3, _ = rhs(I + 1, U - 0.5 * H * k2)
            k4, _ = rhs(I, U - H * k3)
            ustar = U - H / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            if np.max(np.abs(ustar)) > 2.0 * R:
                raise ChartError("a characteristic left the chart")
            K1, G1 = rhs(I, ustar)
            K2, G2 = rhs(I + 1, ustar + 0.5 * H * K1)
            K3, G3 = rhs(I + 1, ustar + 0.5 * H * K2)
            _, G4 = rhs(I + 2, ustar + H * K3)
            V1 = G1
            V2 = np.einsum("nij,nqj->nqi", b[I + 1], 0.5 * H * V1) + G2
            V3 = np.einsum("nij,nqj->nqi", b[I + 1], 0.5 * H * V2) + G3
            V4 = np.einsum("nij,nqj->nqi", b[I + 2], H * V3) + G4
            inc = H / 6.0 * (V1 + 2 * V2 + 2 * V3 + V4)
            # feet beyond the grid edge are clamped: repeated extrapolation is unstable,
            # and boundary errors are damped by the stable block on their way inward
            delta = np.clip(ustar, -R, R) - ug
            for q, i in enumerate(I):
                dl = delta[q][:, None]
                interp = eye + dl * (D + 0.5 * dl * (D2 + dl / 3.0 * D3))
                Hn[i + 2] = interp @ Hn[i] @ A[q].T + inc[q]
        Hn[:, j0] = 0.0
        change = float(np.max(np.abs(Hn - Hk)))
        history.append(change)
        Hk = Hn
        if change <= tol:
            break
        if len(history) >= 4 and history[-1] > history[-2] > history[-3] > history[-4]:
            raise GapTooSmallError(f"graph transform diverging (changes {history[-4:]})")
    else:
        raise GapTooSmallError(f"graph transform did not converge in {max_iter} iterations")
    valid_from = int(np.searchsorted(frame.s_grid, frame.s_grid[0] + S_w - 1e-12))
    return ManifoldChart(frame.s_grid, ug, Hk, Delta, S_w, valid_from, history, D)


def invariance_rhs(chart, frame, blocked, idx, stride_vals=None):
    """Right side of the invariance equation for h at node indices idx.

    d_s h = -d_u h [a u + g1(u, h)] + [b h + g2(u, h)].
    """
    ug = chart.u_grid
    vals = chart.values[idx]
    dh = chart.du_nodes(idx)
    u = np.broadcast_to(ug, (len(idx), len(ug)))
    g1, g2 = blocked.at_nodes(idx, u[..., None], vals)
    drift = frame.a[idx][:, None, 0, 0] * u + g1[..., 0]
    return -dh * drift[..., None] + np.einsum("nij,nqj->nqi", frame.b[idx], vals) + g2


def check_partial_s_h(chart, frame, blocked, stride=1, node_stride=1, u_max=None):
    """Max relative residual of central differences in s against the invariance equation.

    Evaluated on |u| <= u_max (default Delta); the grid beyond Delta is a
    margin whose edge nodes carry the clamped-feet boundary error.
    """
    N = len(chart.s_grid)
    u_max = chart.Delta if u_max is None else u_max
    cols = np.abs(chart.u_grid) <= u_max * (1 + 1e-12)
    idx = np.arange(chart.valid_from + stride, N - stride, node_stride)
    fd = (chart.values[idx + stride] - chart.values[idx - stride]) / (2.0 * stride * frame.step)
    rhs = invariance_rhs(chart, frame, blocked, idx)
    fd, rhs = fd[:, cols], rhs[:, cols]
    scale = np.max(np.abs(rhs))
    if scale == 0.0:
        return float(np.max(np.abs(fd)))
    return float(np.max(np.abs(fd - rhs)) / scale)


def invariance_defect(chart, frame, blocked, i, u0):
    """Distance to the graph after one RK4 step (2*step) started on the graph at node i."""
    H = 2.0 * frame.step
    u0 = np.atleast_1d(np.asarray(u0, dtype=float))
    y = np.concatenate([u0[:, None], chart.at([i], u0[None])[0]], axis=1)[None]
    y1 = blocked_step(frame, blocked, i, y, H)[0]
    v_graph = chart.at([i + 2], y1[None, :, 0])[0]
    return float(np.max(np.linalg.norm(y1[:, 1:] - v_graph, axis=1)))


def blocked_step(frame, blocked, i, y, H):
    """One RK4 step of the full blocked system from node i to i+2 (or i-2 if H < 0).

    y has shape (1, n, d).
    """
    e = frame.e
    j = 1 if H > 0 else -1

    def rhs(node, y):
        g1, g2 = blocked.at_nodes(np.array([node]), y[..., :e], y[..., e:])
        lin = np.einsum("ij,nqj->nqi", frame.m[node], y)
        return lin + np.concatenate([g1, g2], axis=-1)

    k1 = rhs(i, y)
    k2 = rhs(i + j, y + 0.5 * H * k1)
    k3 = rhs(i + j, y + 0.5 * H * k2)
    k4 = rhs(i + 2 * j, y + H * k3)
    return y + H / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def omega_modulus(blocked, chart, Delta, node_stride=100, n_pts=9, nodes=None):
    """Sampled sup of the derivative norms of g1, g2 (and d_u h) on the Delta box.

    The chart term is evaluated only where |u| <= min(Delta, chart radius).
    """
    fr = blocked.frame
    e, d = fr.e, fr.d
    if nodes is None:
        start = chart.valid_from if chart is not None else 0
        nodes = np.arange(start, len(fr.s_grid), node_stride)
    axes = [np.linspace(-Delta, Delta, n_pts)] * d
    mesh = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
    y = np.broadcast_to(mesh, (len(nodes),) + mesh.shape)
    worst = 0.0
    for block in blocked.jacobian_blocks(nodes, y[..., :e], y[..., e:]):
        if block.size:
            worst = max(worst, float(np.max(np.linalg.norm(block, ord=2, axis=(-2, -1)))))
    if chart is not None:
        r = min(Delta, chart.radius)
        uq = np.broadcast_to(np.linspace(-r, r, 4 * n_pts + 1), (len(nodes), 4 * n_pts + 1))
        worst = max(worst, float(np.max(np.abs(chart.du(nodes, uq)))))
    return worst
