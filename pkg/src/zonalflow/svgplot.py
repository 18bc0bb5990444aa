"""Static SVG rendering of eccentricity-vector diagrams.

Operates on the serialized phase-map payload (the same JSON the service
emits), so a dumped file re-ingests to a byte-identical image: contour
polylines from marching squares over the polar grid, a dashed impact
circle, frozen-orbit markers (dot = center, cross = saddle), and a
greyed infeasible annulus.
"""

from __future__ import annotations

import math

__all__ = ["marching_squares", "render_svg"]


def _interp(p_lo, p_hi, v_lo, v_hi, level):
    t = 0.5 if v_hi == v_lo else (level - v_lo) / (v_hi - v_lo)
    return (p_lo[0] + t * (p_hi[0] - p_lo[0]), p_lo[1] + t * (p_hi[1] - p_lo[1]))


def marching_squares(xs, ys, values, mask, level):
    """Contour segments of values == level on a structured grid.

    ``values[i][j]`` sits at (xs[i], ys[j]); masked cells are skipped.
    Returns a list of ((x0, y0), (x1, y1)) segments in grid coordinates.
    Saddle-ambiguous cells are resolved by the cell-center average.
    """
    segments = []
    n_x, n_y = len(xs), len(ys)
    for i in range(n_x - 1):
        for j in range(n_y - 1):
            idx = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            if any(mask[a][b] for a, b in idx):
                continue
            corners = [(xs[a], ys[b]) for a, b in idx]
            vals = [values[a][b] for a, b in idx]
            code = 0
            for bit, v in enumerate(vals):
                if v > level:
                    code |= 1 << bit
            if code in (0, 15):
                continue
            edges = {
                0: _interp(corners[0], corners[1], vals[0], vals[1], level),
                1: _interp(corners[1], corners[2], vals[1], vals[2], level),
                2: _interp(corners[3], corners[2], vals[3], vals[2], level),
                3: _interp(corners[0], corners[3], vals[0], vals[3], level),
            }
            table = {
                1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)],
                6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(0, 2)],
                11: [(1, 2)], 12: [(1, 3)], 13: [(0, 1)], 14: [(3, 0)],
            }
            if code in (5, 10):
                center = sum(vals) / 4.0
                if code == 5:
                    pairs = [(3, 0), (1, 2)] if center <= level else [(3, 2), (1, 0)]
                else:
                    pairs = [(0, 1), (2, 3)] if center <= level else [(0, 3), (2, 1)]
            else:
                pairs = table[code]
            for e0, e1 in pairs:
                segments.append((edges[e0], edges[e1]))
    return segments


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def render_svg(payload: dict, size: int = 640, n_levels: int = 13) -> str:
    """Polar contour plot of a phase-map payload as an SVG document."""
    e_grid = payload["e_grid"]
    w_grid = payload["omega_grid"]
    values = payload["values"]
    mask = [[v is None for v in row] for row in values]
    vals = [[0.0 if v is None else v for v in row] for row in values]
    e_max = max(e_grid[-1], 1e-12)
    e_impact = payload.get("e_impact")
    half = size / 2.0
    radius = 0.44 * size

    def to_xy(e, w):
        r = radius * e / e_max
        return (half + r * math.cos(w), half - r * math.sin(w))

    finite = [v for row, mrow in zip(vals, mask) for v, m in zip(row, mrow) if not m]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    # infeasible annulus
    feas_edge = None
    for ie, row in enumerate(mask):
        if all(row):
            feas_edge = e_grid[ie]
            break
    if feas_edge is not None:
        r_in = radius * feas_edge / e_max
        out.append(
            f'<circle cx="{_fmt(half)}" cy="{_fmt(half)}" r="{_fmt(radius)}" fill="#d8d8d8"/>'
        )
        out.append(
            f'<circle cx="{_fmt(half)}" cy="{_fmt(half)}" r="{_fmt(r_in)}" fill="white"/>'
        )
    # contours: closed omega ring handled by wrapping the angular axis
    w_wrapped = list(w_grid) + [w_grid[0] + 2.0 * math.pi]
    vals_wrapped = [row + [row[0]] for row in vals]
    mask_wrapped = [row + [row[0]] for row in mask]
    if finite:
        lo, hi = min(finite), max(finite)
        span = hi - lo or 1.0
        levels = [lo + span * (k + 1) / (n_levels + 1) for k in range(n_levels)]
        for level in levels:
            segs = marching_squares(e_grid, w_wrapped, vals_wrapped, mask_wrapped, level)
            if not segs:
                continue
            parts = []
            for (e0, w0), (e1, w1) in segs:
                x0, y0 = to_xy(e0, w0)
                x1, y1 = to_xy(e1, w1)
                parts.append(f"M{_fmt(x0)} {_fmt(y0)}L{_fmt(x1)} {_fmt(y1)}")
            out.append(
                f'<path d="{"".join(parts)}" stroke="#3465a4" stroke-width="1" fill="none"/>'
            )
    # outer boundary
    out.append(
        f'<circle cx="{_fmt(half)}" cy="{_fmt(half)}" r="{_fmt(radius)}" '
        f'stroke="black" stroke-width="1" fill="none"/>'
    )
    # impact circle, dashed
    if e_impact is not None and e_impact < e_max:
        r_imp = radius * e_impact / e_max
        out.append(
            f'<circle cx="{_fmt(half)}" cy="{_fmt(half)}" r="{_fmt(r_imp)}" '
            f'stroke="black" stroke-width="1" stroke-dasharray="6 4" fill="none"/>'
        )
    # frozen-orbit markers
    for fo in payload.get("frozen", []):
        x, y = to_xy(fo["e"], fo["omega"])
        if fo.get("classification") == "center":
            out.append(
                f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="#cc0000" '
                f'class="frozen-center"/>'
            )
        else:
            d = 4.5
            out.append(
                f'<path d="M{_fmt(x - d)} {_fmt(y - d)}L{_fmt(x + d)} {_fmt(y + d)}'
                f'M{_fmt(x - d)} {_fmt(y + d)}L{_fmt(x + d)} {_fmt(y - d)}" '
                f'stroke="#cc0000" stroke-width="2" class="frozen-saddle"/>'
            )
    # axis labels
    for label, w in (("0", 0.0), ("pi/2", 0.5 * math.pi), ("pi", math.pi), ("-pi/2", -0.5 * math.pi)):
        x, y = to_xy(e_max * 1.07, w)
        out.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="12" text-anchor="middle">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
