"""Named experiments run by the command line tool.

Each scenario reads typed parameters, runs the computation and returns a
ScenarioResult: criterion rows (name, measured, threshold, pass), curves
for curves.csv / plot.svg and optional extra CSV files.
"""
from dataclasses import dataclass, field

import numpy as np

from . import io
from .attractor import (FiberedSet, Section, fixed_point_section, hausdorff, lyapunov_test,
                        pullback_test)
from .benchmarks import get, scalar_section_exact
from .cocycle import FlowPoint, cocycle_defect
from .errors import ConfigurationError
from .parallel import parallel_map
from .reduction import (BlockedNonlinearity, asymptotic_phase, build_frame, check_partial_s_h,
                        invariance_defect, pliss_check, roundtrip_error,
                        select_constants)
from .spectrum import LinearFamily, averaged_split, dichotomy_projection, dynamical_spectrum


@dataclass
class Criterion:
    name: str
    measured: float
    threshold: float
    passed: bool
    note: str = ""


@dataclass
class ScenarioResult:
    criteria: list
    curves: dict = field(default_factory=dict)
    logy: bool = True
    title: str = ""
    files: dict = field(default_factory=dict)  # filename -> writer(path)

    @property
    def passed(self):
        return bool(self.criteria) and all(c.passed for c in self.criteria)


class Params:
    """Typed access to the [params] section with defaults and validation."""

    def __init__(self, raw):
        self.raw = dict(raw)
        self.used = set()

    def _get(self, key, default):
        self.used.add(key)
        return self.raw.get(key, default)

    def float(self, key, default, positive=False):
        val = self._get(key, default)
        try:
            val = float(val)
        except (TypeError, ValueError):
            raise ConfigurationError(f"parameter {key!r} must be a number, got {val!r}") from None
        if not np.isfinite(val) or (positive and not val > 0):
            raise ConfigurationError(f"parameter {key!r} must be {'positive' if positive else 'finite'}")
        return val

    def int(self, key, default, minimum=1):
        val = self._get(key, default)
        try:
            val = int(val)
        except (TypeError, ValueError):
            raise ConfigurationError(f"parameter {key!r} must be an integer, got {val!r}") from None
        if val < minimum:
            raise ConfigurationError(f"parameter {key!r} must be >= {minimum}")
        return val

    def floats(self, key, default, positive=False):
        val = self._get(key, default)
        if isinstance(val, str):
            try:
                val = [float(v) for v in val.replace(";", ",").split(",") if v.strip()]
            except ValueError:
                raise ConfigurationError(f"parameter {key!r} must be a comma separated list") from None
        val = [float(v) for v in val]
        if positive and any(not v > 0 for v in val):
            raise ConfigurationError(f"entries of {key!r} must be positive")
        return val

    def str(self, key, default):
        return str(self._get(key, default)).strip()

    def unused(self):
        return sorted(set(self.raw) - self.used)


def _crit(name, measured, threshold, passed, note=""):
    return Criterion(name, float(measured), float(threshold), bool(passed), note)


# ------------------------------------------------------------ fixed point

def fixed_point(system, params, seed, threads):
    t0 = params.float("t0", 1.0, positive=True)
    grid = params.int("grid", 4096, minimum=4)
    tol = params.float("tol", 1e-10, positive=True)
    max_iter = params.int("max_iter", 200)
    sup_tol = params.float("sup_tol", 1e-6, positive=True)
    alpha_tol = params.float("alpha_tol", 1e-3, positive=True)
    n_coc = params.int("cocycle_samples", 100)
    span = params.float("cocycle_span", 5.0, positive=True)
    coc_eps = params.float("cocycle_eps", 0.1, positive=True)
    coc_radius = params.float("cocycle_radius", 0.5, positive=True)
    coc_tol = params.float("cocycle_tol", 1e-6, positive=True)
    coc_systems = [s.strip() for s in params.str("cocycle_systems", "B1,B2").split(",") if s.strip()]

    rows = []
    rng = np.random.default_rng(seed)
    for name in coc_systems:
        fld = get(name)
        m, d = fld.flow.dim, fld.dim
        z = FlowPoint(rng.uniform(0, 2 * np.pi, (n_coc, m)), rng.uniform(-coc_radius, coc_radius, (n_coc, d)))
        s = rng.uniform(-span, span, n_coc)
        t = rng.uniform(-span, span, n_coc)
        defects = parallel_map(
            lambda k: cocycle_defect(FlowPoint(z.p[k], z.x[k]), s[k], t[k], fld, coc_eps),
            range(n_coc), threads)
        worst = float(np.nanmax(defects)) if np.all(np.isfinite(defects)) else np.inf
        rows.append(_crit(f"C2.cocycle_defect[{name}]", worst, coc_tol, worst <= coc_tol))

    m = system.flow.dim
    c0 = Section(np.zeros((grid,) * m + (system.dim,)))
    fp = fixed_point_section(c0, t0, system, tol=tol, max_iter=max_iter)
    files = {"section.csv": lambda path: io.write_section(path, fp.section)}
    if system.name == "B1-scalar":
        exact = scalar_section_exact(fp.section.nodes()[:, 0], system.flow.omega[0])
        err = float(np.max(np.abs(fp.section.node_values()[:, 0] - exact)))
        rows.append(_crit("C3.section_sup_error", err, sup_tol, err <= sup_tol))
        gap = abs(fp.alpha_hat - np.exp(-t0))
        rows.append(_crit("C3.alpha_hat", fp.alpha_hat, np.exp(-t0), gap <= alpha_tol,
                          f"|alpha_hat - exp(-t0)| = {float(gap)!r}"))
    else:
        rows.append(_crit("C3.alpha_hat", fp.alpha_hat, 1.0, fp.alpha_hat < 1.0, "contraction"))
    k = np.arange(1, len(fp.increments) + 1)
    return ScenarioResult(rows, {"increment": (k, fp.increments)}, True,
                          "section operator increments", files)


# ------------------------------------------------------- attractor tests

def _metric_suite(n_triples, rng):
    sym = tri = ident = 0.0
    for _ in range(n_triples):
        clouds = [rng.normal(size=(rng.integers(1, 30), 2)) * rng.uniform(0.1, 3) for _ in range(3)]
        a, b, c = clouds
        dab, dba = hausdorff(a, b), hausdorff(b, a)
        sym = max(sym, abs(dab - dba))
        tri = max(tri, dab - hausdorff(a, c) - hausdorff(c, b))
        ident = max(ident, hausdorff(a, a), hausdorff(a, a[rng.permutation(len(a))]))
    return sym, tri, ident


def attractor_equivalence(system, params, seed, threads):
    n_triples = params.int("metric_triples", 1000)
    metric_tol = params.float("metric_tol", 1e-12, positive=True)
    t0 = params.float("t0", 1.0, positive=True)
    grid = params.int("grid", 128, minimum=4)
    tol = params.float("tol", 1e-3, positive=True)
    pull_tol = params.float("pullback_tol", 1e-4, positive=True)
    t_max = params.float("pullback_horizon", 10.0, positive=True)
    n_t = params.int("pullback_points", 10)
    d_radius = params.float("D_radius", 0.5, positive=True)
    shift = params.float("decoy_shift", 0.5, positive=True)
    w_radius = params.float("W_radius", 1.0, positive=True)
    v_radii = params.floats("V_radii", "0.5,0.1", positive=True)
    horizon = params.float("horizon", 20.0, positive=True)
    samples = params.int("samples", 64)

    rng = np.random.default_rng(seed)
    sym, tri, ident = _metric_suite(n_triples, rng)
    rows = [_crit("C1.hausdorff_symmetry", sym, metric_tol, sym <= metric_tol),
            _crit("C1.hausdorff_triangle", max(tri, 0.0), metric_tol, tri <= metric_tol),
            _crit("C1.hausdorff_identity", ident, metric_tol, ident <= metric_tol)]

    m, d = system.flow.dim, system.dim
    fp = fixed_point_section(Section(np.zeros((grid,) * m + (d,))), t0, system, tol=1e-10)
    A = fp.graph()
    decoy = fp.graph(shift)
    nodes = A.base_grid
    offsets = np.array([-d_radius, 0.0, d_radius])
    D = FiberedSet(nodes, [np.repeat(offsets[:, None], d, axis=1)] * len(nodes), grid_shape=A.grid_shape)
    t_list = np.linspace(t_max / n_t, t_max, n_t)

    pb = pullback_test(A, D, t_list, system, tol=pull_tol, threads=threads)
    pb_decoy = pullback_test(decoy, D, t_list, system, tol=pull_tol, threads=threads)
    ly = lyapunov_test(A, w_radius, v_radii, system, sample_count=samples, horizon=horizon, tol=tol, seed=seed)
    ly_decoy = lyapunov_test(decoy, w_radius, v_radii, system, sample_count=samples, horizon=horizon,
                             tol=tol, seed=seed)
    final = pb.diagnostics.get("final", np.inf)
    rows += [
        _crit("C4.pullback_graph", final, pull_tol, pb.passed),
        _crit("C4.lyapunov_graph", ly.diagnostics.get("terminal", np.inf), tol, ly.passed),
        _crit("C4.pullback_decoy_rejected", pb_decoy.diagnostics.get("final", np.inf), pull_tol,
              not pb_decoy.passed),
        _crit("C4.lyapunov_decoy_rejected", ly_decoy.diagnostics.get("terminal", np.inf), tol,
              not ly_decoy.passed),
    ]
    curves = {}
    for name, rep in (("pullback_graph", pb), ("pullback_decoy", pb_decoy),
                      ("lyapunov_graph", ly), ("lyapunov_decoy", ly_decoy)):
        if rep.convergence_curve:
            x, y = zip(*rep.convergence_curve)
            curves[name] = (x, y)
    files = {"attractor.csv": lambda path: io.write_fibered(path, A)}
    return ScenarioResult(rows, curves, True, "attractor tests", files)


# --------------------------------------------------------------- spectrum

def _near_points(intervals, points):
    if len(intervals) != len(points):
        return np.inf
    return max(max(abs(lo - pt), abs(hi - pt)) for (lo, hi), pt in zip(intervals, sorted(points)))


def spectrum(system, params, seed, threads):
    eps_list = params.floats("eps", "0.1", positive=True)
    T = params.float("T", 200.0, positive=True)
    n_starts = params.int("n_starts", 3)
    margin = params.float("margin", 0.02, positive=True)
    bisect_tol = params.float("bisect_tol", 1e-3, positive=True)
    alpha = params.float("alpha", 0.25, positive=True)
    beta = params.float("beta", 0.5, positive=True)
    expected = params.floats("expected", "")
    expected_tol = params.float("expected_tol", 1e-2, positive=True)
    n_points = params.int("base_samples", 8)

    family = LinearFamily.from_field(system)
    pts = system.flow.random_points(n_points, np.random.default_rng(seed))
    estimates = parallel_map(
        lambda e: dynamical_spectrum(family, e, bisect_tol=bisect_tol, T=T, margin=margin,
                                     n_starts=n_starts, p_samples=pts), eps_list, threads)
    rows, curves = [], {}
    for eps, est in zip(eps_list, estimates):
        tag = f"eps={eps!r}"
        if expected:
            dist = _near_points(est.intervals, expected)
            rows.append(_crit(f"C5.intervals_near_expected[{tag}]", dist, expected_tol, dist <= expected_tol,
                              " ".join(f"[{lo!r},{hi!r}]" for lo, hi in est.intervals)))
        center, stable = est.split(alpha, beta)
        c_ext = max((max(abs(lo), abs(hi)) for lo, hi in center), default=np.inf)
        s_top = max((hi for _, hi in stable), default=np.inf)
        rows.append(_crit(f"C6.center_inside_alpha[{tag}]", c_ext, alpha, c_ext < alpha))
        rows.append(_crit(f"C6.stable_below_minus_beta[{tag}]", s_top, -beta, s_top < -beta))
        for k, (lo, hi) in enumerate(est.intervals):
            for end, val in (("lo", lo), ("hi", hi)):
                xs, ys = curves.setdefault(f"interval{k}_{end}", ([], []))
                xs.append(eps)
                ys.append(val)
    return ScenarioResult(rows, curves, False, "spectral intervals against eps")


# ---------------------------------------------------------- Q continuity

def q_continuity(system, params, seed, threads):
    eps_list = params.floats("eps", "0.1,0.05,0.025", positive=True)
    grid = params.int("p_grid", 4)
    lam_star = params.float("lam_star", -0.375)
    lam_alt = params.floats("lam_alt", "-0.3,-0.45")
    T = params.float("T", 50.0, positive=True)
    slack = params.float("slack", 0.2, positive=True)
    idem_tol = params.float("idempotence_tol", 1e-8, positive=True)
    lam_tol = params.float("lam_tol", 1e-5, positive=True)
    if any(e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])):
        raise ConfigurationError("eps must be strictly decreasing")

    family = LinearFamily.from_field(system)
    Q0 = averaged_split(system).Q0
    p_grid = system.flow.grid(grid)
    lams = [lam_star] + lam_alt
    jobs = [(e, lam) for e in eps_list for lam in lams]
    qs = dict(zip(jobs, parallel_map(lambda j: dichotomy_projection(family, p_grid, j[0], j[1], T),
                                     jobs, threads)))
    devs = [float(np.max(np.linalg.norm(qs[(e, lam_star)] - Q0, ord=2, axis=(1, 2)))) for e in eps_list]
    ratios = [b / a for a, b in zip(devs, devs[1:])]
    worst_ratio = max(ratios, default=0.0)
    idem = max(float(np.max(np.abs(q @ q - q))) for q in qs.values())
    lam_dev = max((float(np.max(np.abs(qs[(e, lam)] - qs[(e, lam_star)]))) for e in eps_list for lam in lam_alt),
                  default=0.0)
    rows = [_crit("C7.deviation_decreasing", worst_ratio, 1.0 + slack,
                  worst_ratio <= 1.0 + slack and devs[-1] == min(devs),
                  " ".join(repr(v) for v in devs)),
            _crit("C7.idempotence", idem, idem_tol, idem <= idem_tol),
            _crit("C7.lam_star_independence", lam_dev, lam_tol, lam_dev <= lam_tol)]
    return ScenarioResult(rows, {"sup_p|Q-Q0|": (eps_list, devs)}, True, "projection deviation against eps")


# ---------------------------------------------------------- reduction

def _frame(system, params):
    eps = params.float("eps", 0.05, positive=True)
    S = params.float("S", 100.0, positive=True)
    s_start = params.float("s_start", 0.0)
    step = params.float("step", 0.005, positive=True)
    p = params.floats("p", ",".join(["0"] * system.flow.dim))
    alpha = params.float("alpha", 0.25, positive=True)
    beta = params.float("beta", 0.5, positive=True)
    factor = params.float("defect_factor", 1e-4, positive=True)
    if len(p) != system.flow.dim:
        raise ConfigurationError(f"p needs {system.flow.dim} angles")
    family = LinearFamily.from_field(system)
    split = averaged_split(system, alpha=alpha, beta=beta)
    frame = build_frame(family, np.array(p), eps, S, split, step=step, s_start=s_start,
                        defect_factor=factor, check=False)
    return frame, factor


def reduction_frame(system, params, seed, threads):
    frame, factor = _frame(system, params)
    rt_tol = params.float("roundtrip_tol", 1e-5, positive=True)
    n_rt = params.int("roundtrip_starts", 2)
    limit = factor * (1.0 + frame.l_norm)
    sv = np.linalg.svd(frame.sigma, compute_uv=False)
    norms = np.maximum(sv[:, 0], 1.0 / sv[:, -1])
    rng = np.random.default_rng(seed)
    x0s = rng.normal(size=(n_rt, frame.d))
    x0s /= np.linalg.norm(x0s, axis=1, keepdims=True)
    rt = max(parallel_map(lambda x: roundtrip_error(frame, x), list(x0s), threads))
    rows = [_crit("C8.offdiag_defect", frame.offdiag_defect, limit, frame.offdiag_defect <= limit),
            _crit("C8.sigma_bound", float(norms.max()), frame.theta_bound,
                  norms.max() <= frame.theta_bound * (1 + 1e-12)),
            _crit("C8.roundtrip", rt, rt_tol, rt <= rt_tol)]
    off = np.maximum(np.linalg.norm(frame.m[:, :frame.e, frame.e:], axis=(1, 2)),
                     np.linalg.norm(frame.m[:, frame.e:, :frame.e], axis=(1, 2)))
    sl = slice(None, None, 20)
    curves = {"|sigma|": (frame.s_grid[sl], sv[sl, 0]), "|sigma^-1|": (frame.s_grid[sl], 1.0 / sv[sl, -1]),
              "offdiag": (frame.s_grid[sl], off[sl])}
    files = {"frame.csv": lambda path: io.write_frame(path, frame)}
    return ScenarioResult(rows, curves, True, "frame along the base orbit", files)


def _manifold_setup(system, params):
    defaults = {"S": 45.0, "s_start": -160.0}
    for key, val in defaults.items():
        params.raw.setdefault(key, val)
    frame, _ = _frame(system, params)
    gamma = params.float("gamma", 0.1, positive=True)
    delta = params.float("delta", 0.25, positive=True)
    chart_tol = params.float("chart_tol", 1e-11, positive=True)
    blocked = BlockedNonlinearity(frame, system)
    constants, chart = select_constants(frame, blocked, gamma=gamma, delta=delta,
                                        chart_kwargs=dict(tol=chart_tol))
    return frame, blocked, constants, chart


def _constant_rows(constants):
    return (f"Delta={constants.Delta!r} omega={constants.omega_of_Delta!r} k={constants.k!r} "
            f"admissible={constants.admissible}")


def manifold(system, params, seed, threads):
    frame, blocked, constants, chart = _manifold_setup(system, params)
    du_tol = params.float("du_tol", 1e-3, positive=True)
    inv_tol = params.float("invariance_tol", 1e-5, positive=True)
    ds_h_tol = params.float("ds_h_tol", 1e-2, positive=True)
    order_min = params.float("ds_h_order_min", 1.8, positive=True)
    n_nodes = params.int("sample_nodes", 20)
    D = constants.Delta
    valid = np.arange(chart.valid_from, len(frame.s_grid) - 2)
    j0 = int(np.argmin(np.abs(chart.u_grid)))
    h0 = float(np.max(np.abs(chart.values[valid, j0])))
    du0 = float(np.max(np.abs(chart.du(valid, np.zeros((len(valid), 1))))))
    nodes = valid[np.linspace(0, len(valid) - 1, n_nodes).astype(int)]
    us = np.linspace(-D, D, 9)
    inv = max(invariance_defect(chart, frame, blocked, int(i), us) for i in nodes)
    res = [check_partial_s_h(chart, frame, blocked, stride=k) for k in (1, 2, 4)]
    order = float(np.log2(res[1] / res[0])) if res[0] > 0 else np.inf
    rows = [_crit("C9.h_at_zero", h0, 0.0, h0 == 0.0, _constant_rows(constants)),
            _crit("C9.du_h_at_zero", du0, du_tol, du0 <= du_tol),
            _crit("C9.invariance_defect", inv, inv_tol, inv <= inv_tol),
            _crit("C9.ds_h_residual", res[0], ds_h_tol, res[0] <= ds_h_tol,
                  f"strides 1,2,4: {' '.join(repr(r) for r in res)}"),
            _crit("C9.ds_h_residual_order", order, order_min, order >= order_min)]
    i_mid = int(valid[len(valid) // 2])
    curves = {f"h{j + 1}(s={frame.s_grid[i_mid]:.3g},u)": (chart.u_grid, chart.values[i_mid, :, j])
              for j in range(chart.values.shape[2])}
    curves["du h(s,0)"] = (frame.s_grid[valid][::20], chart.du(valid, np.zeros((len(valid), 1)))[::20, 0].ravel())
    files = {"chart.csv": lambda path: io.write_chart(path, chart, node_stride=20)}
    return ScenarioResult(rows, curves, False, "integral manifold chart", files)


def asymptotic_phase_scenario(system, params, seed, threads):
    frame, blocked, constants, chart = _manifold_setup(system, params)
    n_starts = params.int("starts", 10)
    n_graph = params.int("graph_starts", 3)
    S_track = params.float("S_track", 15.0, positive=True)
    slack = params.float("slack", 0.1, positive=True)
    slope_slack = params.float("slope_slack", 0.05, positive=True)
    graph_tol = params.float("graph_tol", 1e-5, positive=True)
    floor = params.float("floor", 1e-10, positive=True)
    D = constants.Delta
    rng = np.random.default_rng(seed)
    starts = rng.uniform(-D, D, size=(n_starts, frame.d))
    i0 = frame.index(0.0)

    def track(z):
        return asymptotic_phase(z, frame, chart, blocked, constants, S=S_track, slack=slack,
                                slope_slack=slope_slack, floor=floor)

    reports = parallel_map(track, list(starts), threads)
    rate = constants.beta - constants.gamma
    ratios, slopes = [], []
    for r in reports:
        bound = r.bound_prefactor * np.exp(-rate * r.times)
        ratios.append(float(np.max(r.deviations / ((1 + slack) * bound + floor))))
        slopes.append(r.slope if np.isfinite(r.slope) else np.inf)
    exited = sum(r.exited for r in reports)
    u_graph = rng.uniform(-D / 2, D / 2, size=n_graph)
    g_starts = [np.concatenate([[u], chart.at([i0], np.array([[u]]))[0, 0]]) for u in u_graph]
    g_dev = max(float(np.max(r.deviations)) for r in parallel_map(track, g_starts, threads))
    slope_max = -rate + slope_slack
    note = _constant_rows(constants) + (f" exited={exited}" if exited else "")
    rows = [_crit("C10.pointwise_bound_ratio", max(ratios), 1.0, max(ratios) <= 1.0 and not exited, note),
            _crit("C10.tail_slope", max(slopes), slope_max, max(slopes) <= slope_max),
            _crit("C10.on_graph_tracking", g_dev, graph_tol, g_dev <= graph_tol)]
    curves = {f"start{k}": (r.times, r.deviations) for k, r in enumerate(reports)}
    curves["bound0"] = (reports[0].times, reports[0].bound_prefactor * np.exp(-rate * reports[0].times))
    files = {"tracking.csv": lambda path: io.write_tracking(path, reports[0])}
    return ScenarioResult(rows, curves, True, "distance to the shadow on the chart", files)


def pliss(system, params, seed, threads):
    frame, blocked, constants, chart = _manifold_setup(system, params)
    samples = params.int("samples", 100)
    horizon = params.float("horizon", 40.0, positive=True)
    tol = params.float("tol", 1e-3, positive=True)
    c_tol = params.float("containment_tol", 1e-4, positive=True)
    rep = pliss_check(frame, chart, blocked, constants, sample_count=samples, horizon=horizon,
                      tol=tol, containment_tol=c_tol, seed=seed)
    dg = rep.diagnostics
    note = _constant_rows(constants) + f" verdict={rep.verdict}"
    rows = [_crit("C11.reduced_attraction", dg["reduced_terminal"], tol,
                  dg["reduced_attracting"] and dg["reduced_stable"], note),
            _crit("C11.lifted_terminal_distance", dg["terminal"], tol, dg["terminal"] <= tol),
            _crit("C11.graph_containment", dg["containment"], c_tol, dg["containment_ok"],
                  f"bounded={dg['bounded_count']}/{samples}")]
    x, y = zip(*rep.convergence_curve)
    xr, yr = zip(*rep.reduced_curve)
    return ScenarioResult(rows, {"full": (x, y), "reduced": (xr, yr)}, True,
                          "distance to the lifted attractor")


SCENARIOS = {
    "attractor-equivalence": (attractor_equivalence, "B1-scalar", "t0, grid, pullback_horizon, W_radius, V_radii",
                              "pullback and Lyapunov attraction agree for compact invariant sets"),
    "fixed-point": (fixed_point, "B1-scalar", "t0, grid, tol",
                    "a contracting section operator has a fixed point whose graph is a Lyapunov attractor"),
    "spectrum": (spectrum, "constant-diag01", "eps, T, alpha, beta",
                 "the dynamical spectrum splits near the averaged eigenvalues for small eps"),
    "q-continuity": (q_continuity, "B1", "eps, p_grid, lam_star, T",
                     "the dichotomy projection converges to the averaged projection as eps -> 0"),
    "reduction-frame": (reduction_frame, "B1", "eps, S, step, p",
                        "a bounded kinematic similarity block-diagonalizes the rapid linear family"),
    "manifold": (manifold, "B2", "eps, S, s_start, step, gamma, delta",
                 "the integral manifold is a locally invariant graph tangent to the center bundle"),
    "asymptotic-phase": (asymptotic_phase_scenario, "B2", "eps, S, s_start, starts, S_track",
                         "small solutions are tracked exponentially by solutions on the manifold"),
    "pliss": (pliss, "B2", "eps, S, s_start, samples, horizon",
              "attraction within the manifold implies attraction in the full space"),
}


def resolve_system(name, inline=None):
    if name == "inline":
        if not inline:
            raise ConfigurationError("system = inline needs a [system] section")
        from .expr import inline_field
        freqs = [float(v) for v in inline.get("frequencies", "").split(",") if v.strip()]
        comps = []
        while f"f{len(comps) + 1}" in inline:
            comps.append(inline[f"f{len(comps) + 1}"])
        if not freqs or not comps:
            raise ConfigurationError("[system] needs frequencies and f1, f2, ...")
        return inline_field(freqs, comps)
    return get(name)


def list_table():
    lines = [f"{'scenario':<22} {'default system':<16} {'parameters':<48} statement"]
    for name, (_, system, req, anchor) in SCENARIOS.items():
        lines.append(f"{name:<22} {system:<16} {req:<48} {anchor}")
    return "\n".join(lines)


