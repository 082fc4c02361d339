"""Deterministic SVG figures of sets and iterate paths.

Every coordinate is written with a fixed number of decimals and no metadata
(timestamps, ids from memory addresses) is emitted, so equal inputs give
byte-identical files.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .sets import ConeV, HalfSpace, LinearSubspace, Polyhedron, Ray
from .sphere import build_spherical_polytope

SIZE = 480
PAD = 24
COLORS = {"A": "#1f77b4", "B": "#d62728", "path": "#222222"}


def _f(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


class _Frame:
    """World-to-screen map for a square view box."""

    def __init__(self, lo: np.ndarray, hi: np.ndarray):
        span = float(max(hi - lo))
        centre = 0.5 * (lo + hi)
        self.lo = centre - 0.5 * span
        self.hi = centre + 0.5 * span
        self.scale = (SIZE - 2 * PAD) / span

    def xy(self, p) -> tuple[str, str]:
        return (_f(PAD + (p[0] - self.lo[0]) * self.scale),
                _f(SIZE - PAD - (p[1] - self.lo[1]) * self.scale))

    def box(self) -> list[np.ndarray]:
        (x0, y0), (x1, y1) = self.lo, self.hi
        return [np.array(v) for v in ((x0, y0), (x1, y0), (x1, y1), (x0, y1))]

    def far(self) -> float:
        return 4.0 * float(np.linalg.norm(self.hi - self.lo)) + float(np.abs(self.lo).max() + np.abs(self.hi).max())


def _clip(poly: list[np.ndarray], a: np.ndarray, b: float) -> list[np.ndarray]:
    """Sutherland-Hodgman step against the half-plane <a, p> <= b."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp, fq = float(a @ p) - b, float(a @ q) - b
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            out.append(p + fp / (fp - fq) * (q - p))
    return out


def _cone_polygon(gens: np.ndarray, radius: float) -> list[np.ndarray] | None:
    """Planar cone as a polygon fan out to ``radius``; None for the whole plane."""
    ang = np.sort(np.mod(np.arctan2(gens[:, 1], gens[:, 0]), 2 * math.pi))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
    k = int(np.argmax(gaps))
    if gaps[k] < math.pi - 1e-12:
        return None
    start = ang[(k + 1) % len(ang)]
    width = 2 * math.pi - gaps[k]
    steps = max(1, math.ceil(width / (math.pi / 16)))
    arc = [radius * np.array([math.cos(start + width * i / steps), math.sin(start + width * i / steps)])
           for i in range(steps + 1)]
    return [np.zeros(2)] + arc


def _set_shape(s, frame: _Frame, color: str) -> list[str]:
    far = frame.far()
    style = f'fill="{color}" fill-opacity="0.18" stroke="{color}" stroke-width="1.5"'
    if isinstance(s, (HalfSpace, Polyhedron)):
        poly = frame.box()
        for h in (s.halfspaces if isinstance(s, Polyhedron) else (s,)):
            poly = _clip(poly, h.a, h.b)
            if not poly:
                return []
        return [_polygon(poly, frame, style)]
    if isinstance(s, ConeV):
        fan = _cone_polygon(s.generators, far)
        poly = frame.box() if fan is None else fan
        if fan is not None:
            for a, b in _box_halfplanes(frame):
                poly = _clip(poly, a, b)
        return [_polygon(poly, frame, style)] if poly else []
    line_style = f'stroke="{color}" stroke-width="2.5" fill="none"'
    if isinstance(s, Ray):
        d = s.direction / np.linalg.norm(s.direction)
        return [_line(np.zeros(2), far * d, frame, line_style)]
    if isinstance(s, LinearSubspace):
        if len(s.basis) == 0:
            x, y = frame.xy(np.zeros(2))
            return [f'<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>']
        if len(s.basis) >= 2:
            return [_polygon(frame.box(), frame, style)]
        d = s.basis[0] / np.linalg.norm(s.basis[0])
        return [_line(-far * d, far * d, frame, line_style)]
    raise TypeError(f"cannot draw {type(s).__name__}")


def _box_halfplanes(frame: _Frame):
    (x0, y0), (x1, y1) = frame.lo, frame.hi
    return [(np.array([1.0, 0.0]), x1), (np.array([-1.0, 0.0]), -x0),
            (np.array([0.0, 1.0]), y1), (np.array([0.0, -1.0]), -y0)]


def _polygon(pts, frame: _Frame, style: str) -> str:
    coords = " ".join(",".join(frame.xy(p)) for p in pts)
    return f'<polygon points="{coords}" {style}/>'


def _line(p, q, frame: _Frame, style: str) -> str:
    (x1, y1), (x2, y2) = frame.xy(p), frame.xy(q)
    return f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" {style} clip-path="url(#view)"/>'


def _legend(entries: Sequence[tuple[str, str]]) -> list[str]:
    out = []
    for i, (label, color) in enumerate(entries):
        y = PAD + 14 * i
        out.append(f'<rect x="{SIZE - 110}" y="{y - 8}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{SIZE - 95}" y="{y + 1}" font-size="11" font-family="sans-serif">{label}</text>')
    return out


def _document(body: list[str]) -> str:
    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<defs><clipPath id="view"><rect x="{PAD}" y="{PAD}" width="{SIZE - 2 * PAD}" '
        f'height="{SIZE - 2 * PAD}"/></clipPath></defs>',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def render_plane(set_a, set_b, points: Sequence[np.ndarray]) -> str:
    """Planar sets with the iterate polyline and one marker per iterate."""
    pts = [np.asarray(p, dtype=float) for p in points]
    cloud = np.array(pts + [np.zeros(2), np.ones(2), -np.ones(2)])
    lo, hi = cloud.min(axis=0), cloud.max(axis=0)
    margin = 0.1 * float(max(hi - lo))
    frame = _Frame(lo - margin, hi + margin)
    body = _set_shape(set_a, frame, COLORS["A"]) + _set_shape(set_b, frame, COLORS["B"])
    body += _path(pts, [frame.xy(p) for p in pts], [False] * len(pts))
    body += _legend([("A", COLORS["A"]), ("B", COLORS["B"]), ("iterates", COLORS["path"])])
    return _document(body)


def _path(pts, screen, hidden) -> list[str]:
    out = []
    if len(pts) > 1:
        coords = " ".join(f"{x},{y}" for x, y in screen)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{COLORS["path"]}" stroke-width="1.2"/>')
    for i, ((x, y), h) in enumerate(zip(screen, hidden)):
        fill = "white" if h else COLORS["path"]
        dash = ' stroke-dasharray="2,1.5"' if h else ""
        out.append(f'<circle cx="{x}" cy="{y}" r="3.5" fill="{fill}" stroke="{COLORS["path"]}"{dash}/>')
        out.append(f'<text x="{x}" y="{y}" dx="5" dy="-5" font-size="10" font-family="sans-serif">{i}</text>')
    return out


def render_sphere_orthographic(set_a: ConeV, set_b: ConeV, points: Sequence[np.ndarray],
                               arc_samples: int = 64) -> str:
    """S^2 seen from +z: drop the z coordinate, dash everything with z < 0."""
    frame = _Frame(np.array([-1.1, -1.1]), np.array([1.1, 1.1]))
    cx, cy = frame.xy(np.zeros(2))
    body = [f'<circle cx="{cx}" cy="{cy}" r="{_f(frame.scale)}" fill="none" stroke="#888888"/>']
    for cone, color in ((set_a, COLORS["A"]), (set_b, COLORS["B"])):
        poly = build_spherical_polytope(cone)
        for edge in poly.edges:
            body += _arc_runs(edge.sample(arc_samples), frame, color)
    units = [p / np.linalg.norm(p) for p in (np.asarray(q, dtype=float) for q in points) if np.linalg.norm(p) > 0]
    body += _path(units, [frame.xy(u) for u in units], [u[2] < 0 for u in units])
    body += _legend([("A'", COLORS["A"]), ("B'", COLORS["B"]), ("iterates", COLORS["path"])])
    return _document(body)


def _arc_runs(samples: np.ndarray, frame: _Frame, color: str) -> list[str]:
    """Split a sampled arc into front (solid) and back (dashed) polylines."""
    out = []
    run: list[np.ndarray] = [samples[0]]
    back = samples[0][2] < 0
    for p in samples[1:]:
        if (p[2] < 0) != back:
            out.append(_arc_polyline(run + [p], frame, color, back))
            run, back = [p], p[2] < 0
        else:
            run.append(p)
    out.append(_arc_polyline(run, frame, color, back))
    return [s for s in out if s]


def _arc_polyline(run, frame: _Frame, color: str, back: bool) -> str:
    if len(run) < 2:
        return ""
    coords = " ".join(",".join(frame.xy(p)) for p in run)
    dash = ' stroke-dasharray="4,3"' if back else ""
    return f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"{dash}/>'
