"""Deterministic SVG emission for trajectories, thimbles and polygon
diagrams.

Output is reproducible byte-for-byte: elements are written in sorted order,
coordinates at fixed precision, and the viewBox is fitted to the geometry
with a 5% margin.
"""

from __future__ import annotations

from .errors import EmptyGeometry

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f")


def _fmt(x):
    return f"{x:.6f}"


def _fit_viewbox(points, margin=0.05):
    xs = [p.real for p in points]
    ys = [-p.imag for p in points]          # SVG y grows downward
    if not xs:
        raise EmptyGeometry("no geometry to render")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    w = max(x1 - x0, 1e-9)
    h = max(y1 - y0, 1e-9)
    mx, my = margin * w, margin * h
    return x0 - mx, y0 - my, w + 2 * mx, h + 2 * my


def _path_d(samples):
    pts = [complex(z) for z in samples]
    head = f"M {_fmt(pts[0].real)} {_fmt(-pts[0].imag)}"
    rest = " ".join(f"L {_fmt(z.real)} {_fmt(-z.imag)}" for z in pts[1:])
    return f"{head} {rest}" if rest else head


def render_paths(paths, markers=(), width=640, decimate=1):
    """SVG document for labelled polylines.

    Parameters
    ----------
    paths : list of (label, samples)
        Samples are complex sequences; rendered in sorted label order.
    markers : list of (label, complex)
        Point markers (critical points, turning points).
    decimate : int
        Keep every k-th sample (endpoints always kept).
    """
    allpts = []
    drawn = []
    for label, samples in sorted(paths, key=lambda t: t[0]):
        pts = [complex(z) for z in samples]
        if len(pts) < 2:
            continue
        if decimate > 1:
            pts = pts[::decimate] + ([pts[-1]] if (len(pts) - 1) % decimate else [])
        drawn.append((label, pts))
        allpts.extend(pts)
    mk = sorted(((label, complex(z)) for label, z in markers), key=lambda t: t[0])
    allpts.extend(z for _, z in mk)
    if not allpts:
        raise EmptyGeometry("no geometry to render")
    x, y, w, h = _fit_viewbox(allpts)
    scale = w / width
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x)} {_fmt(y)} '
        f'{_fmt(w)} {_fmt(h)}" width="{width}">',
    ]
    for i, (label, pts) in enumerate(drawn):
        color = _PALETTE[i % len(_PALETTE)]
        lines.append(
            f'<path id="{label}" d="{_path_d(pts)}" fill="none" '
            f'stroke="{color}" stroke-width="{_fmt(1.5 * scale)}"/>')
    for label, z in mk:
        lines.append(
            f'<circle id="{label}" cx="{_fmt(z.real)}" cy="{_fmt(-z.imag)}" '
            f'r="{_fmt(3.0 * scale)}" fill="#000000"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_polygon_diagram(values, polygons, zeta, width=640):
    """Critical-value plane with convex polygon chains and the w_inf ray.

    ``values`` maps id -> complex; ``polygons`` is an iterable of vertex-id
    tuples; ``zeta`` sets the direction of the two edges at infinity.
    """
    vals = {k: complex(v) for k, v in values.items()}
    if not vals:
        raise EmptyGeometry("no critical values")
    span = max(abs(a - b) for a in vals.values() for b in vals.values()) or 1.0
    ray = complex(zeta) / abs(complex(zeta)) * span
    paths = []
    for poly in sorted(tuple(p) for p in polygons):
        chain = [vals[i] for i in poly]
        closed = [chain[0] + ray] + chain + [chain[-1] + ray]
        paths.append(("Q-" + "-".join(str(i) for i in poly), closed))
    markers = [(f"w{k}", v) for k, v in vals.items()]
    return render_paths(paths, markers, width)
