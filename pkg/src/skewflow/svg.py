"""Minimal SVG line plots (polylines, optional log scale on y)."""
import numpy as np

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def line_plot(path, curves, title="", logy=False, width=640, height=400):
    """Write ``curves`` (name -> (x, y)) as an SVG file."""
    pad = 50
    series = []
    for name, (x, y) in curves.items():
        x = np.ravel(np.asarray(x, dtype=float))
        y = np.ravel(np.asarray(y, dtype=float))
        ok = np.isfinite(x) & np.isfinite(y) & ((y > 0) if logy else True)
        y = np.log10(y[ok]) if logy else y[ok]
        if len(y):
            series.append((name, x[ok], y))
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>']
    if series:
        xmin = min(s[1].min() for s in series)
        xmax = max(s[1].max() for s in series)
        ymin = min(s[2].min() for s in series)
        ymax = max(s[2].max() for s in series)
        xspan = (xmax - xmin) or 1.0
        yspan = (ymax - ymin) or 1.0

        def sx(v):
            return pad + (v - xmin) / xspan * (width - 2 * pad)

        def sy(v):
            return height - pad - (v - ymin) / yspan * (height - 2 * pad)

        parts.append(f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
                     'fill="none" stroke="black"/>')
        ylab = "log10 " if logy else ""
        parts.append(f'<text x="{pad}" y="{height - 15}" font-size="11">x: {xmin:.3g} .. {xmax:.3g}</text>')
        parts.append(f'<text x="{width - pad}" y="{height - 15}" text-anchor="end" font-size="11">'
                     f'{ylab}y: {ymin:.3g} .. {ymax:.3g}</text>')
        for k, (name, x, y) in enumerate(series):
            color = _COLORS[k % len(_COLORS)]
            pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
            parts.append(f'<text x="{pad + 8}" y="{pad + 16 + 14 * k}" font-size="11" fill="{color}">{name}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
