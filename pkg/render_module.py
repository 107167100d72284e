# file: render_module.py
"""
SVG output for patches and vertex links.

The SVG text is assembled by hand with a fixed attribute order and three-decimal
coordinates, so identical input gives byte-identical files.
"""

import math
from pathlib import Path
from typing import Dict, Optional

from pydantic import BaseModel, Field

from config import DEFAULT_PALETTE, SVG_MARGIN, SVG_SCALE, get_logger
from errors_module import RenderError
from lattice_module import to_euclidean

logger = get_logger(__name__)

PIECE_FILL = {"lozenge": "#eeeeee", "triangle": "#ffffff"}
TICK_FRACTION = 0.28


class RenderSpec(BaseModel):
    scale: float = Field(SVG_SCALE, gt=0.0)
    margin: float = Field(SVG_MARGIN, ge=0.0)
    palette_map: Dict[str, str] = Field(default_factory=lambda: dict(DEFAULT_PALETTE))
    out_path: Optional[str] = None


def _fmt(x):
    text = f"{x:.3f}"
    return "0.000" if text == "-0.000" else text


def _colour(spec, color):
    try:
        return spec.palette_map[color]
    except KeyError:
        raise RenderError(f"color {color!r} has no display colour") from None


class _Canvas:
    def __init__(self, points, spec):
        self.spec = spec
        if points:
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            self.x0, self.y1 = min(xs), max(ys)
            width, height = max(xs) - self.x0, self.y1 - min(ys)
        else:
            self.x0 = self.y1 = 0.0
            width = height = 0.0
        m = spec.margin
        self.width = (width + 2 * m) * spec.scale
        self.height = (height + 2 * m) * spec.scale

    def xy(self, p):
        s, m = self.spec.scale, self.spec.margin
        return ((p[0] - self.x0 + m) * s, (self.y1 - p[1] + m) * s)

    def header(self):
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(self.width)}" '
                f'height="{_fmt(self.height)}" viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">')


def render_patch(patch, spec=None):
    """One polygon per piece and a coloured tick inside each corner."""
    spec = spec or RenderSpec()
    pieces = sorted(patch.placements, key=lambda p: (min(p.cells), p.shape))
    points = [to_euclidean(c.vertex) for p in pieces for c in p.corners]
    canvas = _Canvas(points, spec)

    lines = ['<?xml version="1.0" encoding="UTF-8"?>', canvas.header()]
    for p in pieces:
        corners = [canvas.xy(to_euclidean(c.vertex)) for c in p.corners]
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in corners)
        fill = PIECE_FILL.get(p.kind, "#ffffff")
        lines.append(f'<polygon points="{pts}" fill="{fill}" stroke="#000000" '
                     f'stroke-width="1" data-shape="{p.shape}"/>')
        cx = sum(x for x, _ in corners) / len(corners)
        cy = sum(y for _, y in corners) / len(corners)
        for (x, y), corner in zip(corners, p.corners):
            colour = _colour(spec, corner.arc.color)
            tx = x + (cx - x) * TICK_FRACTION
            ty = y + (cy - y) * TICK_FRACTION
            lines.append(f'<line x1="{_fmt(x)}" y1="{_fmt(y)}" x2="{_fmt(tx)}" y2="{_fmt(ty)}" '
                         f'stroke="{colour}" stroke-width="4"/>')
    lines.append("</svg>")
    svg = "\n".join(lines) + "\n"
    _write(svg, spec)
    return svg


def render_link(graph, spec=None, radius=3.0):
    """Germs evenly on a circle; each corner arc as a coloured curve between its germs."""
    spec = spec or RenderSpec()
    germs = sorted(graph.nodes)
    n = max(len(germs), 1)
    position = {}
    for k, germ in enumerate(germs):
        angle = 2 * math.pi * k / n
        position[germ] = (radius * math.cos(angle), radius * math.sin(angle))
    canvas = _Canvas(list(position.values()) or [(0.0, 0.0)], spec)

    lines = ['<?xml version="1.0" encoding="UTF-8"?>', canvas.header()]
    seen = {}
    for u, w, key, data in sorted(graph.edges(keys=True, data=True), key=lambda e: e[2]):
        pair = tuple(sorted((u, w)))
        bend = seen.get(pair, 0)
        seen[pair] = bend + 1
        x1, y1 = canvas.xy(position[u])
        x2, y2 = canvas.xy(position[w])
        mx, my = (x1 + x2) / 2, (y1 + y2) / 2
        # parallel arcs fan out to alternating sides
        offset = (bend + 1) // 2 * (1 if bend % 2 else -1) * 0.4 * spec.scale
        dx, dy = y2 - y1, x1 - x2
        norm = math.hypot(dx, dy) or 1.0
        qx, qy = mx + dx / norm * offset, my + dy / norm * offset
        colour = _colour(spec, data["color"]) if data.get("color") else "#000000"
        lines.append(f'<path d="M {_fmt(x1)} {_fmt(y1)} Q {_fmt(qx)} {_fmt(qy)} {_fmt(x2)} {_fmt(y2)}" '
                     f'fill="none" stroke="{colour}" stroke-width="{data.get("length") or 1}"/>')
    for germ in germs:
        x, y = canvas.xy(position[germ])
        lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="#000000" '
                     f'data-germ="{germ[0]}:{germ[1]}"/>')
    lines.append("</svg>")
    svg = "\n".join(lines) + "\n"
    _write(svg, spec)
    return svg


def _write(svg, spec):
    if not spec.out_path:
        return
    try:
        path = Path(spec.out_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(svg, encoding="utf-8")
    except OSError as e:
        raise RenderError(f"cannot write {spec.out_path}: {e}") from e
    logger.info("wrote %s", spec.out_path)
