"""Block-diagonalizing frames along a single base trajectory.

For a base point p and eps, the frame sigma(s) has as columns an
orthonormal basis of the center fiber followed by an orthonormal basis of
the stable fiber of the linear family at tau_{s/|eps|}(p).  In the
coordinates x = sigma(s) y the linear family becomes y' = m(s) y with
m = sigma^{-1}(l sigma - sigma') block diagonal, blocks a(s) and b(s).
"""
from dataclasses import dataclass, field

import numpy as np

from ..base_flow import advance
from ..errors import ConfigurationError, FrameError


def fd_derivative(values, h):
    """Fourth-order central differences along axis 0 (drops two nodes at each end)."""
    v = values
    return (-v[4:] + 8.0 * v[3:-1] - 8.0 * v[1:-3] + v[:-4]) / (12.0 * h)


def segment_propagators(family, p, eps, s_nodes, n_sub=2):
    """Phi(s_{j+1}, s_j) for consecutive nodes, all segments integrated at once."""
    d = family.dim
    starts = s_nodes[:-1]
    hs = np.diff(s_nodes) / n_sub
    speed = 1.0 / abs(eps)
    ident = np.eye(d)
    phi = np.broadcast_to(ident, (len(starts), d, d)).copy()

    def mats(t):
        return family.matrix(advance(p, t * speed, family.flow), eps)

    hh = hs[:, None, None]
    for k in range(n_sub):
        t = starts + k * hs
        k1 = mats(t) @ phi
        mid = mats(t + 0.5 * hs)
        k2 = mid @ (phi + 0.5 * hh * k1)
        k3 = mid @ (phi + 0.5 * hh * k2)
        k4 = mats(t + hs) @ (phi + hh * k3)
        phi = phi + hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return phi


def _orthonormal(mat):
    if mat.shape[1] == 1:
        return mat / np.sqrt(mat[:, 0] @ mat[:, 0])
    q, _ = np.linalg.qr(mat)
    return q


def _align(new, prev):
    """Rotate the basis ``new`` within its span to be closest to ``prev``."""
    if new.shape[1] == 1:
        return new if new[:, 0] @ prev[:, 0] >= 0 else -new
    u, _, vt = np.linalg.svd(new.T @ prev)
    return new @ (u @ vt)


def sweep_subspace(props, start_basis, forward=True):
    """Carry an orthonormal basis through segment propagators.

    Forward: B_{j+1} = orth(P_j B_j).  Backward: B_j = orth(P_j^{-1} B_{j+1}).
    Returns an array (n_nodes, d, k) aligned by nearest rotation.
    """
    n = len(props) + 1
    d, k = start_basis.shape
    out = np.empty((n, d, k))
    if forward:
        out[0] = _orthonormal(start_basis)
        for j in range(n - 1):
            out[j + 1] = _align(_orthonormal(props[j] @ out[j]), out[j])
    else:
        inv = np.linalg.inv(props)
        out[-1] = _orthonormal(start_basis)
        for j in range(n - 2, -1, -1):
            out[j] = _align(_orthonormal(inv[j] @ out[j + 1]), out[j + 1])
    return out


def principal_angle(basis1, basis2):
    """Smallest principal angle (radians) between column spans, batched."""
    sv = np.linalg.svd(np.swapaxes(basis1, -1, -2) @ basis2, compute_uv=False)
    return np.arccos(np.clip(sv.max(axis=-1), -1.0, 1.0))


def node_rk4(mats, h, y0):
    """Solve Y' = M(s) Y on a uniform node grid with RK4 of step 2h.

    Stages use M at nodes j, j+1, j+2, so the result lives on even nodes.
    ``mats`` has shape (n, k, k); returns (ceil(n/2), k, c).
    """
    H = 2.0 * h
    n_out = (len(mats) - 1) // 2 + 1
    out = np.empty((n_out,) + y0.shape)
    y = y0
    out[0] = y
    for i in range(n_out - 1):
        m0, m1, m2 = mats[2 * i], mats[2 * i + 1], mats[2 * i + 2]
        k1 = m0 @ y
        k2 = m1 @ (y + 0.5 * H * k1)
        k3 = m1 @ (y + 0.5 * H * k2)
        k4 = m2 @ (y + H * k3)
        y = y + H / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return out


@dataclass
class TrajectoryFrame:
    """Frame data on the node grid s_grid (uniform spacing ``step``)."""

    p: np.ndarray
    eps: float
    e: int
    s_grid: np.ndarray
    step: float
    base_points: np.ndarray
    l: np.ndarray
    Q: np.ndarray
    sigma: np.ndarray
    sigma_inv: np.ndarray
    sigma_prime: np.ndarray
    m: np.ndarray
    offdiag_defect: float
    l_norm: float
    theta_bound: float
    min_angle: float
    constants: dict = field(default_factory=dict)
    family: object = field(default=None, repr=False)

    @property
    def a(self):
        return self.m[:, :self.e, :self.e]

    @property
    def b(self):
        return self.m[:, self.e:, self.e:]

    @property
    def k_bound(self):
        return self.constants.get("k")

    @property
    def d(self):
        return self.sigma.shape[1]

    def index(self, s):
        """Node index of time s (must lie on the grid)."""
        j = np.rint((np.asarray(s) - self.s_grid[0]) / self.step).astype(int)
        if np.any(j < 0) or np.any(j >= len(self.s_grid)):
            raise ConfigurationError(f"s={s} outside the frame")
        return j

    def sigma_at(self, s):
        """Cubic Hermite interpolation of sigma at an arbitrary s."""
        t = (s - self.s_grid[0]) / self.step
        j = int(np.clip(np.floor(t), 0, len(self.s_grid) - 2))
        x = t - j
        h00 = 2 * x ** 3 - 3 * x ** 2 + 1
        h10 = x ** 3 - 2 * x ** 2 + x
        h01 = -2 * x ** 3 + 3 * x ** 2
        h11 = x ** 3 - x ** 2
        sp = self.sigma_prime
        return (h00 * self.sigma[j] + h10 * self.step * sp[j]
                + h01 * self.sigma[j + 1] + h11 * self.step * sp[j + 1])


def _bound_fit(cumulative, s_nodes, rate, growth, min_length):
    """Propagator bounds from cumulative fundamental matrices.

    cumulative[i] = Phi(s_i, s_0).  For ``growth`` (center block) returns
    max |Phi(t,s)| e^{-rate|t-s|} over both time directions and the largest
    log-growth rate over pairs at least ``min_length`` apart.  Otherwise
    (stable block) returns max |Phi(t,s)| e^{rate(t-s)} for t >= s and the
    smallest decay rate.
    """
    inv = np.linalg.inv(cumulative)
    n = len(s_nodes)
    k = 1.0
    fit = -np.inf if growth else np.inf
    for i in range(n):
        fwd = cumulative[i:] @ inv[i]
        dt = s_nodes[i:] - s_nodes[i]
        norms = np.linalg.norm(fwd, ord=2, axis=(1, 2))
        logs = np.log(norms)
        if growth:
            bwd = cumulative[:i + 1] @ inv[i]
            dtb = s_nodes[i] - s_nodes[:i + 1]
            lb = np.log(np.linalg.norm(bwd, ord=2, axis=(1, 2)))
            k = max(k, float(np.max(np.exp(logs - rate * dt))), float(np.max(np.exp(lb - rate * dtb))))
            long_f, long_b = dt >= min_length, dtb >= min_length
            if long_f.any():
                fit = max(fit, float(np.max(logs[long_f] / dt[long_f])))
            if long_b.any():
                fit = max(fit, float(np.max(lb[long_b] / dtb[long_b])))
        else:
            k = max(k, float(np.max(np.exp(logs + rate * dt))))
            long_f = dt >= min_length
            if long_f.any():
                fit = min(fit, float(np.min(-logs[long_f] / dt[long_f])))
    return k, fit


def build_frame(family, p, eps, S, split, step=None, s_start=0.0, pad=40.0, n_sub=2,
                defect_factor=1e-4, min_angle_deg=5.0, bound_stride=None, min_fit_length=None,
                check=True):
    """Block-diagonalizing frame on [s_start, S] along the orbit of p.

    The center basis is carried forward from s_start - pad and the stable
    basis backward from S + pad, so both have converged to the invariant
    fibers on the reported window.  ``split`` supplies the starting bases,
    the center dimension and the rates alpha, beta used for the bound fits.
    """
    if eps == 0:
        raise ConfigurationError("eps must be nonzero")
    if not S > s_start:
        raise ConfigurationError("need S > s_start")
    p = np.asarray(p, dtype=float)
    d, e = family.dim, split.e
    h = step or min(0.005, family.default_step(eps, frac=0.25))
    n_nodes = int(round((S - s_start) / h)) + 1
    n_pad = int(round(pad / h))
    j = np.arange(-n_pad - 2, n_nodes + n_pad + 2)
    s_all = s_start + j * h
    props = segment_propagators(family, p, eps, s_all, n_sub)
    center = sweep_subspace(props, split.L0_basis, forward=True)
    stable = sweep_subspace(props, split.Lminus_basis, forward=False)

    keep = slice(n_pad, n_pad + n_nodes + 4)  # node range with two extra at each end
    sig_ext = np.concatenate([center[keep], stable[keep]], axis=2)
    sigma_prime = fd_derivative(sig_ext, h)
    sigma = sig_ext[2:-2]
    s_grid = s_start + np.arange(n_nodes) * h
    angles = principal_angle(center[keep][2:-2], stable[keep][2:-2])
    min_angle = float(np.degrees(angles.min()))
    if min_angle < min_angle_deg:
        raise FrameError(f"center and stable fibers within {min_angle:.3g} degrees")

    base = advance(p, s_grid / abs(eps), family.flow)
    lmat = family.matrix(base, eps)
    sigma_inv = np.linalg.inv(sigma)
    m = sigma_inv @ (lmat @ sigma - sigma_prime)
    sel = np.diag([0.0] * e + [1.0] * (d - e))
    Q = sigma @ sel @ sigma_inv
    off = max(float(np.max(np.linalg.norm(m[:, :e, e:], ord=2, axis=(1, 2)))),
              float(np.max(np.linalg.norm(m[:, e:, :e], ord=2, axis=(1, 2)))))
    l_norm = float(np.max(np.linalg.norm(lmat, ord=2, axis=(1, 2))))
    theta = float(max(np.max(np.linalg.norm(sigma, ord=2, axis=(1, 2))),
                      np.max(np.linalg.norm(sigma_inv, ord=2, axis=(1, 2)))))
    if check and off > defect_factor * (1.0 + l_norm):
        raise FrameError(f"block off-diagonal defect {off:.3g} exceeds {defect_factor}(1+|l|_0)")

    frame = TrajectoryFrame(p, eps, e, s_grid, h, base, lmat, Q, sigma, sigma_inv, sigma_prime, m,
                            off, l_norm, theta, min_angle, family=family)
    frame.constants = frame_constants(frame, split.alpha, split.beta, bound_stride, min_fit_length)
    return frame


def frame_constants(frame, alpha, beta, stride=None, min_length=None):
    """Measured propagator constant k and exponent fits of the diagonal blocks."""
    h = frame.step
    e = frame.e
    a_fund = node_rk4(frame.a, h, np.eye(e))
    b_fund = node_rk4(frame.b, h, np.eye(frame.d - e))
    s_even = frame.s_grid[::2][:len(a_fund)]
    span = s_even[-1] - s_even[0]
    stride = stride or max(1, int(round(0.25 / (2 * h))))
    min_length = min_length if min_length is not None else span / 4
    ka, afit = _bound_fit(a_fund[::stride], s_even[::stride], alpha, True, min_length)
    kb, bfit = _bound_fit(b_fund[::stride], s_even[::stride], beta, False, min_length)
    return {"k": max(ka, kb), "k_center": ka, "k_stable": kb, "alpha_fit": afit, "beta_fit": bfit,
            "alpha": alpha, "beta": beta}


def gauge_derivative(frame):
    """Independent sigma' from the invariance of the two fibers.

    A basis C of an invariant subspace moved without internal rotation
    satisfies C' = (I - C C^T) l C.  Valid for the minimal-rotation gauge
    that nearest-rotation alignment produces.
    """
    e = frame.e
    out = np.empty_like(frame.sigma)
    for cols in (slice(0, e), slice(e, None)):
        c = frame.sigma[:, :, cols]
        lc = frame.l @ c
        out[:, :, cols] = lc - c @ (np.swapaxes(c, 1, 2) @ lc)
    return out


def roundtrip_error(frame, x0, rtol=1e-12):
    """Max over even nodes of |sigma y - x| for y' = m y versus x' = l x.

    The x-trajectory is an independent adaptive solve of the unblocked
    linear family.
    """
    from scipy.integrate import solve_ivp

    x0 = np.asarray(x0, dtype=float)
    y = node_rk4(frame.m, frame.step, frame.sigma_inv[0] @ x0)
    s_even = frame.s_grid[::2][:len(y)]
    family, eps = frame.family, frame.eps
    speed = 1.0 / abs(eps)

    def rhs(s, x):
        return family.matrix(advance(frame.p, s * speed, family.flow)[None], eps)[0] @ x

    sol = solve_ivp(rhs, (s_even[0], s_even[-1]), x0, method="DOP853", t_eval=s_even,
                    rtol=rtol, atol=1e-14)
    mapped = np.einsum("nij,nj->ni", frame.sigma[::2][:len(y)], y)
    return float(np.max(np.linalg.norm(mapped - sol.y.T, axis=1)))
