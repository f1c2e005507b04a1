"""Deterministic SVG rendering of 2-dimensional repositories.

One circle per stored point, one clipped line segment per plane, integer
axis ticks.  Output depends only on the repository contents, so the same
repo always renders byte-identical markup.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .errors import DimensionMismatchError

_SCALE = 48.0
_MARGIN = 40.0


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _clip_plane_to_box(alpha: np.ndarray, hi: float):
    """Intersection segment of 1 + a1*x + a2*y = 0 with [0, hi]^2, or None."""
    a1, a2 = float(alpha[0]), float(alpha[1])
    pts = []
    # crossings with the four box edges
    if a2 != 0.0:
        for x in (0.0, hi):
            y = -(1.0 + a1 * x) / a2
            if 0.0 <= y <= hi:
                pts.append((x, y))
    if a1 != 0.0:
        for y in (0.0, hi):
            x = -(1.0 + a2 * y) / a1
            if 0.0 <= x <= hi:
                pts.append((x, y))
    # dedupe corner hits
    uniq = []
    for p in pts:
        if all(abs(p[0] - u[0]) > 1e-9 or abs(p[1] - u[1]) > 1e-9 for u in uniq):
            uniq.append(p)
    if len(uniq) < 2:
        return None
    return uniq[0], uniq[1]


def render_svg(repo) -> str:
    """Render a dimension-2 repository; raises on any other dimension."""
    state = repo.state
    if state.n != 2:
        raise DimensionMismatchError(f"plotting needs dimension 2, repository has {state.n}")
    hi = float(repo.mapping.base - 1)
    side = 2 * _MARGIN + hi * _SCALE

    def to_px(x: float, y: float) -> tuple[float, float]:
        return _MARGIN + x * _SCALE, _MARGIN + (hi - y) * _SCALE

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        version="1.1",
        width=_fmt(side),
        height=_fmt(side),
        viewBox=f"0 0 {_fmt(side)} {_fmt(side)}",
    )
    x0, y0 = to_px(0.0, hi)
    x1, y1 = to_px(hi, 0.0)
    ET.SubElement(
        svg,
        "rect",
        {
            "class": "frame",
            "x": _fmt(x0),
            "y": _fmt(y0),
            "width": _fmt(x1 - x0),
            "height": _fmt(y1 - y0),
            "fill": "none",
            "stroke": "#888888",
            "stroke-width": "1",
        },
    )
    ticks = ET.SubElement(svg, "g", {"class": "ticks", "font-size": "10", "fill": "#444444"})
    for k in range(repo.mapping.base):
        px, py = to_px(float(k), 0.0)
        t = ET.SubElement(ticks, "text", x=_fmt(px - 3), y=_fmt(py + 16))
        t.text = str(k)
        px, py = to_px(0.0, float(k))
        t = ET.SubElement(ticks, "text", x=_fmt(px - 16), y=_fmt(py + 4))
        t.text = str(k)

    lines = ET.SubElement(
        svg, "g", {"class": "planes", "stroke": "#c0392b", "stroke-width": "1.5"}
    )
    for j in range(state.q):
        seg = _clip_plane_to_box(state._alpha_buf[j], hi)
        if seg is None:
            continue
        (ax, ay), (bx, by) = seg
        pax, pay = to_px(ax, ay)
        pbx, pby = to_px(bx, by)
        ET.SubElement(
            lines,
            "line",
            {
                "class": "plane",
                "x1": _fmt(pax),
                "y1": _fmt(pay),
                "x2": _fmt(pbx),
                "y2": _fmt(pby),
            },
        )

    dots = ET.SubElement(svg, "g", {"class": "points", "fill": "#2c3e50"})
    for pid in range(state.count):
        x, y = state.points[pid]
        px, py = to_px(float(x), float(y))
        ET.SubElement(
            dots,
            "circle",
            {"class": "point", "cx": _fmt(px), "cy": _fmt(py), "r": "4"},
        )
    return ET.tostring(svg, encoding="unicode") + "\n"
