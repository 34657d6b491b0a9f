"""Linear families over the torus: exponential dichotomies, the dynamical
spectrum, dichotomy projections and the averaged spectral split.

All time arguments are fast times s; the base point moves as
tau_{s/|eps|}(p).  Exponents are rates per unit of s.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from .base_flow import advance, ergodic_average
from .errors import ConfigurationError, HypothesisError, RangeError, ResolutionError
from .parallel import parallel_map


class LinearFamily:
    """Matrix family l(p, eps) over a base flow.

    ``matrix(theta (n, m), eps) -> (n, d, d)``.
    """

    def __init__(self, matrix, flow, dim, name=""):
        self.matrix = matrix
        self.flow = flow
        self.dim = int(dim)
        self.name = name

    @classmethod
    def from_field(cls, field):
        """Linearization l_eps(p) = D_x f(p, 0, eps) of a vector field."""
        return cls(field.linear_part, field.flow, field.dim, field.name)

    @classmethod
    def constant(cls, mat, flow):
        mat = np.asarray(mat, dtype=float)

        def matrix(theta, eps):
            return np.broadcast_to(mat, (np.atleast_2d(theta).shape[0],) + mat.shape).copy()
        return cls(matrix, flow, mat.shape[0], "constant")

    def __call__(self, theta, eps):
        return self.matrix(np.atleast_2d(theta), eps)

    def sup_norm(self, eps, n=4096, seed=0):
        """Sampled sup over the torus of the spectral norm, |l|_0."""
        rng = np.random.default_rng(seed)
        mats = self(self.flow.random_points(n, rng), eps)
        return float(np.max(np.linalg.norm(mats, ord=2, axis=(1, 2))))

    def default_step(self, eps, frac=0.1, cap=0.02):
        """RK4 step resolving the fastest base oscillation in fast time."""
        fastest = np.max(np.abs(self.flow.omega)) / abs(eps)
        return min(cap, frac / fastest) if fastest > 0 else cap


def _positive_qr(mat):
    q, r = np.linalg.qr(mat)
    sign = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    sign[sign == 0] = 1.0
    return q * sign[..., None, :], r * sign[..., :, None]


def _rk4_matrix(family, points, eps, lam, phi, s, h, speed):
    ident = np.eye(family.dim)

    def rhs(t, y):
        mats = family.matrix(advance(points, t * speed, family.flow), eps) - lam * ident
        return mats @ y

    k1 = rhs(s, phi)
    k2 = rhs(s + 0.5 * h, phi + 0.5 * h * k1)
    k3 = rhs(s + 0.5 * h, phi + 0.5 * h * k2)
    k4 = rhs(s + h, phi + h * k3)
    return phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass
class QRSweep:
    """Result of a renormalized propagator sweep over consecutive windows.

    window_exponents: (n_windows, n_points, d), sorted descending per row.
    r_product, log_scale: R-factor product of the first window, so that
    Phi(T) = Q_final @ r_product * exp(log_scale).
    """

    window_exponents: np.ndarray
    q_final: np.ndarray
    r_product: np.ndarray
    log_scale: np.ndarray
    window: float


def qr_sweep(family, points, eps, lam=0.0, window=200.0, n_windows=1, step=None,
             renorm_every=0.5, direction=1.0, start=0.0):
    """Propagate identity frames at each base point with QR renormalization.

    Windows are consecutive: [start, start+T], [start+T, start+2T], ...
    (times multiplied by ``direction``).  Exponents of each window are the
    averaged logarithms of the R diagonals.
    """
    if eps == 0:
        raise ConfigurationError("eps must be nonzero")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = len(points), family.dim
    step = step or family.default_step(eps)
    n_steps = int(np.ceil(window / step - 1e-9))
    h = direction * window / n_steps
    every = max(1, int(round(renorm_every / abs(h))))
    speed = 1.0 / abs(eps)
    phi = np.broadcast_to(np.eye(d), (n, d, d)).copy()
    logs = np.zeros((n_windows, n, d))
    r_prod = np.broadcast_to(np.eye(d), (n, d, d)).copy()
    log_scale = np.zeros(n)
    s = start
    for w in range(n_windows):
        for k in range(n_steps):
            phi = _rk4_matrix(family, points, eps, lam, phi, s, h, speed)
            s = start + direction * (w * window) + (k + 1) * h
            if (k + 1) % every == 0 or k + 1 == n_steps:
                phi, r = _positive_qr(phi)
                logs[w] += np.log(np.diagonal(r, axis1=1, axis2=2))
                if w == 0:
                    r_prod = r @ r_prod
                    norm = np.linalg.norm(r_prod, axis=(1, 2))
                    r_prod /= norm[:, None, None]
                    log_scale += np.log(norm)
        s = start + direction * (w + 1) * window
    exps = -np.sort(-logs / window, axis=2)
    return QRSweep(exps, phi, r_prod, log_scale, window)


def propagator(p, eps, lam, s, family, step=None, scaled=False):
    """Fundamental matrix of dPhi/ds = [-lam I + l(tau_{s/|eps|} p)] Phi, Phi(0) = I.

    With ``scaled=True`` returns (M, log_scale) with Phi = M * exp(log_scale),
    which stays finite when Phi itself would overflow.
    """
    p = np.atleast_2d(p)
    if s == 0:
        eye = np.eye(family.dim)
        return (eye, 0.0) if scaled else eye
    sweep = qr_sweep(family, p, eps, lam, window=abs(s), step=step or family.default_step(eps, cap=0.01),
                     direction=np.sign(s))
    mat = sweep.q_final[0] @ sweep.r_product[0]
    log_scale = float(sweep.log_scale[0])
    if scaled:
        return mat, log_scale
    return mat * np.exp(log_scale)


@dataclass
class ExponentTable:
    """Window exponents at lam = 0 for a set of base points and offsets.

    Translation by -lam I shifts every exponent by -lam exactly, so one
    table serves every lam.
    """

    exponents: np.ndarray  # (n_samples, d), descending per row
    eps: float
    window: float

    def hulls(self, lam=0.0):
        """(d, 2) array of [lo, hi] per exponent index, index 0 largest."""
        ex = self.exponents - lam
        return np.stack([ex.min(axis=0), ex.max(axis=0)], axis=1)


def default_samples(flow, count=8, seed=0):
    return flow.random_points(count, np.random.default_rng(seed))


def exponent_table(family, eps, T=200.0, n_starts=3, p_samples=None, step=None):
    if p_samples is None:
        p_samples = default_samples(family.flow)
    sweep = qr_sweep(family, p_samples, eps, 0.0, window=T, n_windows=n_starts, step=step)
    return ExponentTable(sweep.window_exponents.reshape(-1, family.dim), eps, T)


def growth_exponents(family, p, eps, lam=0.0, T=200.0, n_starts=3, step=None):
    """Per-index hulls [lo, hi] of window exponents over offsets and points."""
    table = exponent_table(family, eps, T, n_starts, np.atleast_2d(p), step)
    return table.hulls(lam)


def ed_test(lam, table, margin=0.02):
    """'dichotomy' if no exponent hull meets lam and the gap around lam is >= 2*margin."""
    if not margin > 0:
        raise ConfigurationError("margin must be positive")
    hulls = table.hulls(lam)
    if np.any((hulls[:, 0] <= 0.0) & (hulls[:, 1] >= 0.0)):
        return "no_dichotomy"
    below = hulls[hulls[:, 1] < 0.0, 1]
    above = hulls[hulls[:, 0] > 0.0, 0]
    lower = below.max() if below.size else -np.inf
    upper = above.min() if above.size else np.inf
    return "dichotomy" if upper - lower >= 2.0 * margin else "no_dichotomy"


@dataclass
class SpectrumEstimate:
    intervals: list
    resolution: float
    window: float
    hulls: np.ndarray = field(repr=False, default=None)

    def split(self, alpha, beta):
        """Partition the intervals into the center group and the stable group.

        Intervals reaching above -(alpha + beta)/2 count as center.
        """
        cut = -0.5 * (alpha + beta)
        center = [iv for iv in self.intervals if iv[1] > cut]
        stable = [iv for iv in self.intervals if iv[1] <= cut]
        return center, stable


def _bisect(table, inside, outside, margin, tol):
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if ed_test(mid, table, margin) == "dichotomy":
            outside = mid
        else:
            inside = mid
    return 0.5 * (inside + outside)


def dynamical_spectrum(family, eps, lam_range=None, bisect_tol=1e-3, T=200.0, margin=0.02,
                       n_starts=3, p_samples=None, table=None, scan_step=0.05):
    """Non-dichotomy set of the lam-translated family as disjoint intervals.

    Each exponent hull supplies a certified non-dichotomy point (its
    midpoint); the boundaries are found by stepping outward to a dichotomy
    point and bisecting to ``bisect_tol``.
    """
    if table is None:
        table = exponent_table(family, eps, T, n_starts, p_samples)
    hulls = table.hulls()
    lo_all, hi_all = hulls[:, 0].min(), hulls[:, 1].max()
    if lam_range is None:
        lam_range = (lo_all - 1.0, hi_all + 1.0)
    if not (lam_range[0] < lo_all and lam_range[1] > hi_all):
        raise RangeError(f"lam_range {lam_range} does not bracket exponents [{lo_all:.4g}, {hi_all:.4g}]")

    intervals = []
    for lo, hi in hulls:
        mid = 0.5 * (lo + hi)
        if intervals and intervals[-1][0] <= mid <= intervals[-1][1]:
            continue
        ends = []
        for sign in (-1.0, 1.0):
            probe = mid
            while ed_test(probe, table, margin) == "no_dichotomy":
                inside = probe
                probe = probe + sign * scan_step
                if not lam_range[0] <= probe <= lam_range[1]:
                    raise RangeError("no dichotomy point found inside lam_range")
            ends.append(_bisect(table, inside, probe, margin, bisect_tol))
        intervals.append((min(ends), max(ends)))
    intervals = sorted(intervals)
    merged = []
    for iv in intervals:
        if merged and iv[0] <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], iv[1]))
        else:
            merged.append(iv)
    return SpectrumEstimate(merged, bisect_tol, table.window, hulls)


# ------------------------------------------------------------ projections

def _right_singular(sweep):
    # Phi = Q R exp(scale): the right singular vectors of Phi are those of R
    _, _, vt = np.linalg.svd(sweep.r_product)
    return np.swapaxes(vt, 1, 2)


def dichotomy_projection(family, p, eps, lam_star, T=50.0, margin=0.02, rank=None, step=None):
    """Projection onto the stable fiber along the center fiber at p.

    Stable directions: right singular vectors of the forward window
    propagator with the smallest singular values.  Center directions: the
    same for the backward window.  ``p`` may be a batch; returns (d, d) or
    (n, d, d).
    """
    single = np.ndim(p) == 1
    pts = np.atleast_2d(p)
    d = family.dim
    step = step or family.default_step(eps)
    fwd = qr_sweep(family, pts, eps, lam_star, window=T, step=step)
    bwd = qr_sweep(family, pts, eps, lam_star, window=T, step=step, direction=-1.0)
    ex = fwd.window_exponents[0]
    n_unstable = (ex > 0).sum(axis=1)
    if np.any(n_unstable != n_unstable[0]):
        raise ResolutionError("center dimension differs between base points; increase T")
    e = int(n_unstable[0])
    if rank is not None and d - e != rank:
        raise ResolutionError(f"stable rank {d - e} differs from expected {rank}; increase T")
    pos = ex[:, :e]
    neg = ex[:, e:]
    if (pos.size and pos.min() < margin) or (neg.size and neg.max() > -margin):
        raise ResolutionError(f"gap around lam_star={lam_star} not resolved at T={T}; increase T")
    v_fwd = _right_singular(fwd)
    v_bwd = _right_singular(bwd)
    stable = v_fwd[:, :, e:]
    center = v_bwd[:, :, d - e:]
    basis = np.concatenate([center, stable], axis=2)
    sel = np.diag([0.0] * e + [1.0] * (d - e))
    q = basis @ sel @ np.linalg.inv(basis)
    return q[0] if single else q


@dataclass
class ProjectionField:
    points: np.ndarray
    eps: float
    matrices: np.ndarray


# --------------------------------------------------------- averaged split

@dataclass
class AveragedSplit:
    l0_bar: np.ndarray
    sigma0: np.ndarray
    sigma_minus: np.ndarray
    L0_basis: np.ndarray
    Lminus_basis: np.ndarray
    Q0: np.ndarray
    e: int
    alpha: float
    beta: float
    leps_bar: np.ndarray = None


def split_matrix(mat, alpha=0.25, beta=0.5):
    """Spectral split of a constant matrix into |Re| < alpha and Re < -beta."""
    if not 0 < alpha < beta:
        raise ConfigurationError("need 0 < alpha < beta")
    mat = np.asarray(mat, dtype=float)
    eig = np.linalg.eigvals(mat)
    center = np.abs(eig.real) < alpha
    stable = eig.real < -beta
    if np.any(~(center | stable)):
        raise HypothesisError(f"eigenvalues {eig[~(center | stable)]} fall outside both groups")
    if not center.any() or not stable.any():
        raise HypothesisError("one of the spectral groups is empty")
    e = int(center.sum())
    _, z0, _ = schur(mat, output="real", sort=lambda re, im: abs(re) < alpha)
    _, zm, _ = schur(mat, output="real", sort=lambda re, im: re < -beta)
    L0 = z0[:, :e]
    Lm = zm[:, :mat.shape[0] - e]
    basis = np.hstack([L0, Lm])
    sel = np.diag([0.0] * e + [1.0] * (mat.shape[0] - e))
    Q0 = basis @ sel @ np.linalg.inv(basis)
    return AveragedSplit(mat, eig[center], eig[stable], L0, Lm, Q0, e, alpha, beta)


def averaged_split(field, eps=0.0, alpha=0.25, beta=0.5, horizon=1e4, step=1e-2, p0=None):
    """Average the linearization over the torus and split its spectrum.

    The split is taken from the eps = 0 average; the eps average is kept
    for reporting.
    """
    flow = field.flow
    p0 = np.zeros(flow.dim) if p0 is None else p0
    d = field.dim

    def observable(eps_val):
        return lambda th: field.linear_part(th, eps_val).reshape(len(th), d * d)

    l0 = ergodic_average(observable(0.0), p0, horizon, step, flow).reshape(d, d)
    out = split_matrix(l0, alpha, beta)
    if eps != 0:
        out.leps_bar = ergodic_average(observable(eps), p0, horizon, step, flow).reshape(d, d)
    else:
        out.leps_bar = l0
    return out


@dataclass
class ContinuityScan:
    eps: list
    deviations: list
    smallest_last: bool
    monotone: bool
    slack: float

    @property
    def passed(self):
        return self.smallest_last and self.monotone


def q_continuity_scan(family, eps_list, p_grid, lam_star, Q0, T=50.0, slack=0.2, threads=None):
    """sup over p_grid of |Q_{p,eps} - Q0| for each eps (spectral norm)."""
    eps_list = list(eps_list)
    if any(e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])) or min(eps_list) <= 0:
        raise ConfigurationError("eps_list must be positive and strictly decreasing")

    def dev(eps):
        qs = dichotomy_projection(family, p_grid, eps, lam_star, T)
        return float(np.max(np.linalg.norm(qs - Q0, ord=2, axis=(1, 2))))

    devs = parallel_map(dev, eps_list, threads)
    smallest_last = devs[-1] == min(devs)
    monotone = all(b <= (1.0 + slack) * a for a, b in zip(devs, devs[1:]))
    return ContinuityScan(eps_list, devs, smallest_last, monotone, slack)
