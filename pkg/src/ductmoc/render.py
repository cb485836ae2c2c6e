"""Standalone SVG drawing of the characteristic net."""
from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import InvalidParameter
from .region_builder import Solution

STYLE = {
    "plus": "#c0392b",
    "minus": "#2471a3",
    "wall": "#111111",
    "stream": "#27ae60",
    "vacuum": "#7d3c98",
    "junction": "#000000",
}


def render_net(sol: Solution | None, path: str | Path, width: int = 1200, streamlines: int = 0) -> Path:
    """Draw walls, both characteristic families, junctions and vacuum rays.

    ``streamlines`` > 0 adds that many traced streamlines.
    """
    if sol is None or not sol.nodes:
        raise InvalidParameter("nothing to render: the solution is empty")
    nodes = sol.nodes
    xs = np.array([n.x for n in nodes])
    ys = np.array([n.y for n in nodes])
    duct = sol.model.duct
    x0, x1 = 0.0, float(xs.max())
    wall_x = np.linspace(x0, x1, 400)
    wall_f = np.array([duct.f(x) for x in wall_x])
    ymax = float(max(wall_f.max(), np.abs(ys).max()))
    pad = 0.05 * max(x1 - x0, 2.0 * ymax)
    scale = (width - 2.0) / (x1 - x0 + 2.0 * pad)
    height = int(np.ceil((2.0 * ymax + 2.0 * pad) * scale)) + 2
    lw = max(0.3, 0.0015 * width) / scale

    def pts(px, py) -> str:
        return " ".join(f"{a:.6g},{b:.6g}" for a, b in zip(px, py))

    body = []
    body.append(f'<g fill="none" stroke-width="{lw:.4g}">')
    for family, table in (("plus", sol.lines_plus), ("minus", sol.lines_minus)):
        body.append(f'<g stroke="{STYLE[family]}">')
        for _, line in sorted(table.items()):
            if len(line) < 2:
                continue
            line = sorted(line, key=lambda n: n.x)
            body.append(f'<polyline points="{pts([n.x for n in line], [n.y for n in line])}"/>')
        body.append("</g>")
    if streamlines > 0:
        from .diagnostics import trace_streamlines

        body.append(f'<g stroke="{STYLE["stream"]}">')
        for tr in trace_streamlines(sol, streamlines):
            body.append(f'<polyline points="{pts(tr[:, 0], tr[:, 1])}"/>')
        body.append("</g>")
    body.append(f'<g stroke="{STYLE["wall"]}" stroke-width="{3 * lw:.4g}">')
    body.append(f'<polyline points="{pts(wall_x, wall_f)}"/>')
    body.append(f'<polyline points="{pts(wall_x, -wall_f)}"/>')
    body.append("</g>")
    body.append(f'<g stroke="{STYLE["vacuum"]}" stroke-width="{2 * lw:.4g}" '
                f'stroke-dasharray="{8 * lw:.4g},{5 * lw:.4g}">')
    for vi in sol.vacuum_interfaces:
        xe = max(x1, vi.x)
        body.append(f'<line x1="{vi.x:.6g}" y1="{vi.y:.6g}" x2="{xe:.6g}" y2="{vi.y_at(xe):.6g}">'
                    f"<title>vacuum interface ({escape(vi.side)})</title></line>")
    body.append("</g></g>")
    body.append(f'<g fill="{STYLE["junction"]}">')
    for name, (x, y) in sol.points.items():
        body.append(f'<circle cx="{x:.6g}" cy="{y:.6g}" r="{4 * lw:.4g}"><title>{escape(name)}</title></circle>')
    body.append("</g>")

    # flip y so the upper wall is drawn on top
    tx = 1.0 + pad * scale
    ty = height / 2.0
    svg = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>characteristic net: {escape(sol.termination.case)}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<g transform="translate({tx:.6g},{ty:.6g}) scale({scale:.6g},{-scale:.6g})">',
        *body,
        "</g>",
        "</svg>",
    ]
    path = Path(path)
    path.write_text("\n".join(svg) + "\n", encoding="utf-8")
    return path
