"""Hand-written SVG output for trajectory plots."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .differential import QuadraticDifferential
from .errors import QuadiffError
from .flow import ToleranceSet, TrajectorySample, trace

GENERATOR = "quadiff-svg 1"

DEFAULT_STYLE = {
    "separatrix": "fill:none;stroke:#c0392b;stroke-width:1.6",
    "generic": "fill:none;stroke:#2c3e50;stroke-width:0.6;stroke-opacity:0.7",
    "arc": "fill:none;stroke:#27ae60;stroke-width:1.4;stroke-dasharray:5,3",
    "zero": "fill:#c0392b;stroke:none",
    "pole": "fill:#ffffff;stroke:#000000;stroke-width:1.2",
    "frame": "fill:none;stroke:#999999;stroke-width:0.8",
    "axis": "fill:none;stroke:#dddddd;stroke-width:0.6",
}


@dataclass
class PlotSpec:
    region: tuple = (-2.0, 2.0, -2.0, 2.0)  # xmin, xmax, ymin, ymax
    seeds: list | None = None  # explicit seeds; otherwise a grid
    density: int = 8  # grid seeds per side
    styles: dict = field(default_factory=lambda: dict(DEFAULT_STYLE))
    equidistant: bool = False  # seed along a vertical leaf at fixed metric spacing
    spacing: float = 0.25
    width: int = 600

    def __post_init__(self):
        x0, x1, y0, y1 = self.region
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"empty plot region {self.region}")
        if self.density <= 0 or self.spacing <= 0:
            raise ValueError("density and spacing must be positive")

    @property
    def height(self) -> int:
        x0, x1, y0, y1 = self.region
        return int(round(self.width * (y1 - y0) / (x1 - x0)))


def _path_d(points: np.ndarray, spec: PlotSpec) -> str:
    x0, x1, y0, y1 = spec.region
    sx = spec.width / (x1 - x0)
    sy = spec.height / (y1 - y0)
    pad = 4 * max(x1 - x0, y1 - y0)
    parts = []
    pen = False
    for z in points:
        if not (np.isfinite(z) and x0 - pad < z.real < x1 + pad and y0 - pad < z.imag < y1 + pad):
            pen = False
            continue
        px = (z.real - x0) * sx
        py = (y1 - z.imag) * sy
        parts.append(f"{'L' if pen else 'M'}{px:.2f},{py:.2f}")
        pen = True
    return " ".join(parts)


def render_svg(groups: dict, spec: PlotSpec, markers: Sequence[tuple] = ()) -> str:
    """SVG document with one layer per trajectory class.

    ``groups`` maps a class name (``separatrix``, ``generic``, ``arc``) to a
    list of point arrays; ``markers`` are ``(kind, z)`` pairs with kind
    ``zero`` or ``pole``.
    """
    x0, x1, y0, y1 = spec.region
    w, h = spec.width, spec.height
    st = spec.styles
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- generator: {GENERATOR} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        '<defs><clipPath id="plot"><rect x="0" y="0" '
        f'width="{w}" height="{h}"/></clipPath></defs>',
    ]
    out.append(f'<g class="axes" style="{st["axis"]}">')
    if x0 < 0 < x1:
        px = -x0 / (x1 - x0) * w
        out.append(f'<line x1="{px:.2f}" y1="0" x2="{px:.2f}" y2="{h}"/>')
    if y0 < 0 < y1:
        py = y1 / (y1 - y0) * h
        out.append(f'<line x1="0" y1="{py:.2f}" x2="{w}" y2="{py:.2f}"/>')
    out.append("</g>")
    for cls in ("generic", "arc", "separatrix"):
        curves = groups.get(cls, [])
        out.append(f'<g class="{cls}" style="{st[cls]}" clip-path="url(#plot)">')
        for pts in curves:
            d = _path_d(np.asarray(pts, dtype=complex), spec)
            if d:
                out.append(f'<path d="{d}"/>')
        out.append("</g>")
    out.append('<g class="critical">')
    for kind, z in markers:
        if z is None or not (x0 <= z.real <= x1 and y0 <= z.imag <= y1):
            continue
        px = (z.real - x0) / (x1 - x0) * w
        py = (y1 - z.imag) / (y1 - y0) * h
        if kind == "zero":
            out.append(f'<circle class="zero" cx="{px:.2f}" cy="{py:.2f}" r="3.5" '
                       f'style="{st["zero"]}"/>')
        else:
            out.append(f'<rect class="pole" x="{px - 4:.2f}" y="{py - 4:.2f}" width="8" '
                       f'height="8" style="{st["pole"]}"/>')
    out.append("</g>")
    out.append(f'<rect class="frame" x="0" y="0" width="{w}" height="{h}" '
               f'style="{st["frame"]}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _safe_trace(phi, seed, direction, theta, tol) -> TrajectorySample | None:
    try:
        return trace(phi, seed, direction, theta, tol, detect_closed=True)
    except QuadiffError:
        return None


def equidistant_seeds(phi: QuadraticDifferential, base: complex, spacing: float, count: int,
                      theta: float = 0.0, controls: ToleranceSet | None = None) -> list[complex]:
    """Points on the transverse leaf through ``base`` at metric spacing ``spacing``.

    Consecutive horizontal leaves through these points are ``spacing`` apart
    in the flat metric.
    """
    tol = (controls or ToleranceSet(l_max=spacing * count)).resolved(phi)
    seeds = [complex(base)]
    for direction in (1, -1):
        s = _safe_trace(phi, base, direction, theta + 0.5, tol)
        if s is None:
            continue
        dist = np.asarray(s.metric)
        pts = s.points
        k = 1
        for i in range(1, len(dist)):
            while k <= count and dist[i] >= k * spacing:
                t = (k * spacing - dist[i - 1]) / (dist[i] - dist[i - 1])
                seeds.append(pts[i - 1] + t * (pts[i] - pts[i - 1]))
                k += 1
    return seeds


def plot_differential(phi: QuadraticDifferential, spec: PlotSpec, theta: float = 0.0,
                      separatrix_list=None, arcs=None,
                      controls: ToleranceSet | None = None) -> str:
    """Foliation picture: separatrices, generic leaves through seeds, optional arcs."""
    tol = (controls or ToleranceSet()).resolved(phi)
    x0, x1, y0, y1 = spec.region
    crit = [c.point.value for c in phi.critical_points if not c.point.is_infinity]
    scale = max(x1 - x0, y1 - y0)
    if spec.seeds is not None:
        seeds = [complex(s) for s in spec.seeds]
    elif spec.equidistant:
        centre = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
        base = centre
        # nudge the base off critical points
        while any(abs(base - c) < 1e-3 * scale for c in crit):
            base += 0.0137 * scale * (1 + 1j)
        seeds = equidistant_seeds(phi, base, spec.spacing, 4 * spec.density, theta, tol)
    else:
        n = spec.density
        seeds = [complex(x0 + (i + 0.5) * (x1 - x0) / n, y0 + (j + 0.5) * (y1 - y0) / n)
                 for j in range(n) for i in range(n)]
    seeds = [s for s in seeds if all(abs(s - c) > 1e-3 * scale for c in crit)]
    generic = []
    for s in seeds:
        for d in (1, -1):
            sample = _safe_trace(phi, s, d, theta, tol)
            if sample is not None:
                generic.append(sample.points)
    if separatrix_list is None:
        from .separatrix import separatrices
        try:
            separatrix_list = separatrices(phi, theta, tol)
        except QuadiffError:
            separatrix_list = []
    groups = {
        "generic": generic,
        "separatrix": [s.sample.points for s in separatrix_list],
        "arc": [np.asarray(a) for a in (arcs or [])],
    }
    markers = [("zero" if c.is_zero or c.order == -1 else "pole", c.point.value)
               for c in phi.critical_points if not c.point.is_infinity]
    return render_svg(groups, spec, markers)


def empty_svg(spec: PlotSpec) -> str:
    return render_svg({}, spec)


def count_paths(svg: str, cls: str) -> int:
    """Number of ``<path>`` elements in the layer of class ``cls``."""
    start = svg.find(f'<g class="{cls}"')
    if start < 0:
        return 0
    end = svg.find("</g>", start)
    return svg.count("<path ", start, end)


def to_polar(points) -> np.ndarray:
    return np.angle(np.asarray(points, dtype=complex)) % (2 * math.pi)
