"""SVG rendering of layouts, masks, groups, and violations.

Vias draw as via_width squares colored by mask class, every group gets a
capsule outline around its template extent, unresolved conflicts draw as
lines between the offending pair, and realized hotspots as window
rectangles. Output bytes are deterministic for identical inputs.
"""

from __future__ import annotations

from pathlib import Path

from .decompose import Decomposition
from .hotspots import HotspotLibrary
from .layout import Layout
from .tech import TechParams
from .verify import ViolationReport

MASK_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd",
               "#ff7f0e", "#17becf", "#bcbd22", "#8c564b")


def render_svg(layout: Layout, decomposition: Decomposition, tech: TechParams,
               report: ViolationReport | None = None,
               library: HotspotLibrary | None = None,
               out_path: str | Path | None = None) -> str:
    """Render to an SVG string; also write it when out_path is given."""
    w = tech.via_width
    half = w / 2
    x0, y0, x1, y1 = layout.bbox
    margin = max(w * 2, 40)
    view = (x0 - margin, y0 - margin, (x1 - x0) + 2 * margin, (y1 - y0) + 2 * margin)

    styles = ["  .via { stroke: #333333; stroke-width: 1; }"]
    for m in range(tech.num_masks):
        styles.append(f"  .mask{m} {{ fill: {MASK_COLORS[m % len(MASK_COLORS)]}; }}")
    styles.append("  .group { fill: none; stroke: #555555; stroke-width: 2; }")
    styles.append("  .conflict { stroke: #ff00ff; stroke-width: 3; }")
    styles.append("  .hotspot { fill: none; stroke: #ff0000; "
                  "stroke-width: 2; stroke-dasharray: 6 3; }")

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{view[0]} {view[1]} {view[2]} {view[3]}">',
        "<style>",
        *styles,
        "</style>",
    ]
    by_id = {v.id: v for v in layout.vias}
    for group in decomposition.groups:
        pts = [by_id[v] for v in group]
        gx0 = min(p.x for p in pts) - half - 3
        gy0 = min(p.y for p in pts) - half - 3
        gw = max(p.x for p in pts) - min(p.x for p in pts) + w + 6
        gh = max(p.y for p in pts) - min(p.y for p in pts) + w + 6
        parts.append(f'<rect class="group" x="{gx0}" y="{gy0}" width="{gw}" '
                     f'height="{gh}" rx="{half + 3}"/>')
    for v in layout.vias:
        mask = decomposition.mask_of_via(v.id)
        parts.append(f'<rect class="via mask{mask}" x="{v.x - half}" '
                     f'y="{v.y - half}" width="{w}" height="{w}"/>')
    if report is not None:
        for c in report.conflicts:
            a, b = by_id[c.a], by_id[c.b]
            parts.append(f'<line class="conflict" x1="{a.x}" y1="{a.y}" '
                         f'x2="{b.x}" y2="{b.y}"/>')
        for h in report.hotspots:
            if library is not None:
                pattern = library.pattern_by_id(h.pattern_id)
                ww, wh = pattern.window_w, pattern.window_h
            else:
                ww = wh = 0
            parts.append(f'<rect class="hotspot" x="{h.origin[0] - half}" '
                         f'y="{h.origin[1] - half}" width="{ww + w}" '
                         f'height="{wh + w}"/>')
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    if out_path is not None:
        Path(out_path).write_text(svg, encoding="utf-8")
    return svg
