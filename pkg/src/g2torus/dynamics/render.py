"""SVG phase portraits of a model on the fundamental domain [0,1)^2."""
from __future__ import annotations

from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from ..config import DEFAULT, SimConfig
from ..homotopy import act
from .extract import Extraction
from .model import ModelMap, find_periodic_points

SIZE = 600
PAD = 30
COLORS = {"sink": "#1f77b4", "source": "#d62728", "saddle": "#2ca02c",
          "unstable": "#d62728", "stable": "#1f77b4", "green": "#2ca02c"}


def _xy(p) -> tuple[float, float]:
    # y grows upwards in the picture
    return PAD + SIZE * float(p[0]), PAD + SIZE * (1.0 - float(p[1]))


def _pieces(path: np.ndarray, stride: int) -> list[np.ndarray]:
    """Split a lifted polyline, reduced mod 1, where it jumps across the square's edges."""
    pts = np.asarray(path)[::stride]
    if len(path) and not np.array_equal(pts[-1], path[-1]):
        pts = np.vstack([pts, path[-1]])
    cell = np.floor(pts)
    red = pts - cell
    cut = np.flatnonzero(np.any(cell[1:] != cell[:-1], axis=1)) + 1
    return [seg for seg in np.split(red, cut) if len(seg) > 1]


def _polyline(seg: np.ndarray, color: str, width: float = 1.2, dash: str = "") -> str:
    coords = " ".join("%.2f,%.2f" % _xy(p) for p in seg)
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{extra}/>')


def portrait_svg(m: ModelMap, extraction: Optional[Extraction] = None,
                 cfg: SimConfig = DEFAULT, stride: int = 20) -> str:
    """SVG text: periodic points, separatrices, green curves and closure classes."""
    if extraction is not None:
        points = extraction.points
    else:
        points = find_periodic_points(m, cfg.search.max_period, cfg.search).points
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE + 2 * PAD}" '
           f'height="{SIZE + 2 * PAD}" viewBox="0 0 {SIZE + 2 * PAD} {SIZE + 2 * PAD}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>']
    if extraction is not None:
        for gid in sorted(extraction.greens):
            for seg in _pieces(extraction.greens[gid], stride):
                out.append(_polyline(seg, COLORS["green"], 0.8, "4,3"))
        for sid in sorted(extraction.traces):
            color = COLORS["unstable" if "unstable" in sid else "stable"]
            for seg in _pieces(extraction.traces[sid].path, stride):
                out.append(_polyline(seg, color))
    flat = sum(1 for p in points if p.kind not in ("sink", "source", "saddle"))
    if flat:
        out.append(f"<!-- {flat} non-hyperbolic periodic points omitted -->")
    for p in points:
        if p.kind not in ("sink", "source", "saddle"):
            continue
        x, y = _xy(p.location)
        r = 5 if p.period == 1 else 4
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{COLORS[p.kind]}" '
                   f'stroke="black" stroke-width="0.5"><title>{escape(p.kind)} period {p.period} '
                   f'({p.location[0]:.4f}, {p.location[1]:.4f})</title></circle>')
    if extraction is not None:
        d = extraction.descriptor
        for c in d.closures:
            if c.knot_class is None:
                continue
            period = d.orbit(c.saddle_orbit).period
            cls = c.knot_class
            for j in range(period):
                x, y = _xy(extraction.points[extraction.point_of[(c.saddle_orbit, j)]].location)
                out.append(f'<text x="{x + 6:.2f}" y="{y - 6:.2f}" font-size="12" '
                           f'font-family="sans-serif">{escape(str(cls))}</text>')
                cls = act(cls, d.matrix)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_phase_portrait(m: ModelMap, out, extraction: Optional[Extraction] = None,
                          cfg: SimConfig = DEFAULT) -> str:
    """Write the portrait to the path ``out``; returns the SVG text."""
    svg = portrait_svg(m, extraction, cfg)
    with open(out, "w") as fh:
        fh.write(svg)
    return svg
