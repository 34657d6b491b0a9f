"""CSV serialization of sections, fibered sets, frames, charts and reports.

Every file has a header line; numbers are written with ``repr`` so that
identical inputs give identical bytes.
"""
import csv

import numpy as np

from .attractor import FiberedSet, Section


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_rows(path, header, rows, preamble=None):
    with open(path, "w", newline="") as fh:
        for line in preamble or []:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _read(path):
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader]


def write_section(path, section):
    """Columns: grid indices, angles, x-components."""
    shape = section.grid_shape
    m, d = len(shape), section.dim
    idx = np.stack(np.unravel_index(np.arange(int(np.prod(shape))), shape), axis=1)
    header = [f"i{j + 1}" for j in range(m)] + [f"theta{j + 1}" for j in range(m)] + [f"x{j + 1}" for j in range(d)]
    rows = (list(i) + list(p) + list(x) for i, p, x in zip(idx, section.nodes(), section.node_values()))
    write_rows(path, header, rows, preamble=[f"grid_shape={'x'.join(map(str, shape))}",
                                             f"chart_radius={section.chart_radius!r}"])


def read_section(path):
    with open(path) as fh:
        meta = dict(ln[2:].strip().split("=", 1) for ln in fh if ln.startswith("# "))
    shape = tuple(int(v) for v in meta["grid_shape"].split("x"))
    header, rows = _read(path)
    m = len(shape)
    vals = np.array([[float(v) for v in row[2 * m:]] for row in rows])
    return Section(vals.reshape(shape + (vals.shape[1],)), float(meta["chart_radius"]))


def write_fibered(path, fset):
    """Columns: node, fiber index, angles, x-components."""
    m, d = fset.base_grid.shape[1], fset.dim
    header = ["node", "k"] + [f"theta{j + 1}" for j in range(m)] + [f"x{j + 1}" for j in range(d)]
    rows = []
    for n, (p, fib) in enumerate(zip(fset.base_grid, fset.fibers)):
        for k, x in enumerate(fib):
            rows.append([n, k] + list(p) + list(x))
    pre = [f"grid_shape={'x'.join(map(str, fset.grid_shape))}"] if fset.grid_shape else []
    write_rows(path, header, rows, preamble=pre)


def read_fibered(path):
    with open(path) as fh:
        meta = dict(ln[2:].strip().split("=", 1) for ln in fh if ln.startswith("# "))
    header, rows = _read(path)
    m = sum(h.startswith("theta") for h in header)
    nodes, fibers = [], []
    for row in rows:
        n = int(row[0])
        if n == len(nodes):
            nodes.append([float(v) for v in row[2:2 + m]])
            fibers.append([])
        fibers[n].append([float(v) for v in row[2 + m:]])
    shape = tuple(int(v) for v in meta["grid_shape"].split("x")) if "grid_shape" in meta else None
    return FiberedSet(np.array(nodes), [np.array(f) for f in fibers], grid_shape=shape)


def _flat_names(prefix, rows, cols):
    return [f"{prefix}{i + 1}{j + 1}" for i in range(rows) for j in range(cols)]


def write_frame(path, frame):
    """Columns: s, then sigma, sigma_inv, a, b flattened row-major."""
    d, e = frame.d, frame.e
    header = (["s"] + _flat_names("sigma", d, d) + _flat_names("sigmainv", d, d)
              + _flat_names("a", e, e) + _flat_names("b", d - e, d - e))
    rows = (np.concatenate([[s], sg.ravel(), si.ravel(), a.ravel(), b.ravel()])
            for s, sg, si, a, b in zip(frame.s_grid, frame.sigma, frame.sigma_inv, frame.a, frame.b))
    pre = [f"eps={frame.eps!r}", f"theta_bound={frame.theta_bound!r}",
           f"offdiag_defect={frame.offdiag_defect!r}", f"k={frame.k_bound!r}"]
    write_rows(path, header, rows, preamble=pre)


def write_chart(path, chart, node_stride=1):
    """Columns: s, u, h components (valid window only)."""
    dv = chart.values.shape[2]
    header = ["s", "u"] + [f"h{j + 1}" for j in range(dv)]
    rows = []
    for i in range(chart.valid_from, len(chart.s_grid), node_stride):
        for u, hv in zip(chart.u_grid, chart.values[i]):
            rows.append([chart.s_grid[i], u] + list(hv))
    write_rows(path, header, rows, preamble=[f"Delta={chart.Delta!r}", f"window={chart.window!r}"])


def write_tracking(path, report):
    """Header block of measured constants, then columns s, dev, u, v, shadow."""
    c = report.constants
    pre = [f"alpha={c.alpha!r}", f"beta={c.beta!r}", f"gamma={c.gamma!r}", f"k={c.k!r}",
           f"Delta={c.Delta!r}", f"omega={c.omega_of_Delta!r}", f"slope={report.slope!r}",
           f"prefactor={report.prefactor!r}", f"bound_prefactor={report.bound_prefactor!r}"]
    dv = report.v.shape[1]
    header = ["s", "dev", "u"] + [f"v{j + 1}" for j in range(dv)] + ["shadow"]
    rows = (np.concatenate([[s, dv_, u[0]], v, [sh[0]]])
            for s, dv_, u, v, sh in zip(report.times, report.deviations, report.u, report.v, report.shadow))
    write_rows(path, header, rows, preamble=pre)


def write_projections(path, field_):
    d = field_.matrices.shape[1]
    m = field_.points.shape[1]
    header = [f"theta{j + 1}" for j in range(m)] + _flat_names("q", d, d)
    rows = (list(p) + list(q.ravel()) for p, q in zip(field_.points, field_.matrices))
    write_rows(path, header, rows, preamble=[f"eps={field_.eps!r}"])
