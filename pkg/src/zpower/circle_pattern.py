"""Orthogonal circle pattern of a PowerMapGrid and its SVG rendering."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .lattice import PowerMapGrid


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class Circle:
    n: int
    m: int
    center: mp.mpc
    radius: mp.mpf
    spread: mp.mpf


@dataclass(frozen=True)
class Kite:
    n: int
    m: int
    vertices: tuple

    def signed_area(self):
        v = self.vertices
        s = 0
        for i in range(4):
            p, q = v[i], v[(i + 1) % 4]
            s += p.real * q.imag - q.real * p.imag
        return s / 2

    def is_convex_positive(self):
        v = self.vertices
        for i in range(4):
            p, q, r = v[i], v[(i + 1) % 4], v[(i + 2) % 4]
            if _cross(q - p, r - q) <= 0:
                return False
        return True


@dataclass(frozen=True)
class PatternDoc:
    N: int
    circles: tuple
    points: tuple          # (n, m, value) at odd sites
    kites: tuple
    bbox: tuple            # (xmin, ymin, xmax, ymax)
    max_spread: mp.mpf
    max_orthogonality: mp.mpf


def _cross(u, v):
    return u.real * v.imag - u.imag * v.real


def _neighbors(N, n, m):
    for dn, dm in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        if 0 <= n + dn <= N and 0 <= m + dm <= N:
            yield n + dn, m + dm


def extract_pattern(grid: PowerMapGrid, tol=None) -> PatternDoc:
    """Circles at even sites, intersection points at odd sites, kites.

    Raises PatternError when the neighbour distances around a circle
    disagree by more than ``tol`` times the radius.
    """
    ctx = grid.ctx
    tol = mp.mpf(ctx.tol if tol is None else tol)
    N = grid.N
    with ctx.work():
        circles = []
        points = []
        worst_spread = mp.mpf(0)
        for n, m in grid.sites():
            c = grid[n, m]
            if (n + m) % 2:
                points.append((n, m, c))
                continue
            ds = [abs(grid[p] - c) for p in _neighbors(N, n, m)]
            r = mp.fsum(ds) / len(ds)
            spread = max(ds) - min(ds)
            if spread > tol * max(1, r):
                raise PatternError(f"neighbour distances disagree by {mp.nstr(spread, 5)} at {(n, m)}")
            worst_spread = max(worst_spread, spread)
            circles.append(Circle(n, m, c, r, spread))
        by_site = {(c.n, c.m): c for c in circles}
        worst_orth = mp.mpf(0)
        for c in circles:
            for dn, dm in ((1, 1), (1, -1)):
                o = by_site.get((c.n + dn, c.m + dm))
                if o is None:
                    continue
                d2 = abs(o.center - c.center) ** 2
                rr = c.radius ** 2 + o.radius ** 2
                worst_orth = max(worst_orth, abs(d2 - rr) / rr)
        kites = tuple(
            Kite(n, m, (grid[n, m], grid[n + 1, m], grid[n + 1, m + 1], grid[n, m + 1]))
            for n in range(N) for m in range(N))
        xs = [c.center.real - c.radius for c in circles] + [c.center.real + c.radius for c in circles]
        ys = [c.center.imag - c.radius for c in circles] + [c.center.imag + c.radius for c in circles]
        xs += [p[2].real for p in points]
        ys += [p[2].imag for p in points]
        bbox = (min(xs), min(ys), max(xs), max(ys))
    return PatternDoc(N, tuple(circles), tuple(points), kites, bbox, worst_spread, worst_orth)


def radius_at(pattern: PatternDoc, n, m):
    for c in pattern.circles:
        if (c.n, c.m) == (n, m):
            return c.radius
    raise KeyError((n, m))


def negative_kites(pattern: PatternDoc):
    return [k for k in pattern.kites if not k.signed_area() > 0]


def _projection_gap(axis, P, Q):
    pa = [axis.real * v.real + axis.imag * v.imag for v in P]
    qa = [axis.real * v.real + axis.imag * v.imag for v in Q]
    return max(min(qa) - max(pa), min(pa) - max(qa))


def kites_overlap(k1: Kite, k2: Kite, slack) -> bool:
    """Interiors intersect?  Both kites must be convex; separating axes are
    the edge normals.  Touching along an edge or vertex is not an overlap."""
    for K in (k1, k2):
        v = K.vertices
        for i in range(4):
            e = v[(i + 1) % 4] - v[i]
            axis = mp.mpc(-e.imag, e.real)
            if _projection_gap(axis, k1.vertices, k2.vertices) >= -slack * abs(axis):
                return False
    return True


def overlapping_kites(pattern: PatternDoc, window=None):
    """Pairs of kites (within the first ``window`` rows/columns) whose
    interiors intersect.  Non-convex kites are reported as (k, None)."""
    N = pattern.N if window is None else min(window, pattern.N)
    kites = [k for k in pattern.kites if k.n < N and k.m < N]
    bad = [(k, None) for k in kites if not k.is_convex_positive()]
    if bad:
        return bad
    scale = max(abs(v) for k in kites for v in k.vertices)
    slack = scale * mp.mpf(2) ** (-mp.mp.prec // 2)
    boxes = []
    for k in kites:
        xs = [float(v.real) for v in k.vertices]
        ys = [float(v.imag) for v in k.vertices]
        boxes.append((min(xs), max(xs), min(ys), max(ys)))
    order = sorted(range(len(kites)), key=lambda i: boxes[i][0])
    out = []
    pad = 1e-9 * float(scale)
    for ii, i in enumerate(order):
        bi = boxes[i]
        for j in order[ii + 1:]:
            bj = boxes[j]
            if bj[0] >= bi[1] - pad:
                break
            if bj[2] >= bi[3] - pad or bi[2] >= bj[3] - pad:
                continue
            if kites_overlap(kites[i], kites[j], slack):
                out.append((kites[i], kites[j]))
    return out


@dataclass(frozen=True)
class SvgOptions:
    scale: float = 100.0
    stroke_width: float = 0.01
    draw_kites: bool = True
    circle_color: str = "#1f4e79"
    kite_color: str = "#999999"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not self.stroke_width > 0:
            raise ValueError("stroke width must be positive")


def _fmt(x) -> str:
    s = "%.15g" % float(x)
    return "0" if s == "-0" else s


def render_svg(pattern: PatternDoc, options: SvgOptions | None = None) -> bytes:
    options = options or SvgOptions()
    if not pattern.circles:
        raise PatternError("empty pattern")
    k = options.scale
    x0, y0, x1, y1 = (float(v) * k for v in pattern.bbox)
    px, py = 0.05 * (x1 - x0), 0.05 * (y1 - y0)
    # content is drawn in math coordinates inside scale(1,-1)
    vb = (x0 - px, -(y1 + py), (x1 - x0) + 2 * px, (y1 - y0) + 2 * py)
    sw = options.stroke_width * k
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{" ".join(_fmt(v) for v in vb)}">',
        '<g transform="scale(1,-1)" fill="none">',
    ]
    if options.draw_kites:
        lines.append(f'<g stroke="{options.kite_color}" stroke-width="{_fmt(sw / 2)}">')
        for kt in pattern.kites:
            pts = list(kt.vertices) + [kt.vertices[0]]
            coords = " ".join(f"{_fmt(p.real * k)},{_fmt(p.imag * k)}" for p in pts)
            lines.append(f'<polyline points="{coords}"/>')
        lines.append("</g>")
    lines.append(f'<g stroke="{options.circle_color}" stroke-width="{_fmt(sw)}">')
    for c in pattern.circles:
        lines.append(f'<circle cx="{_fmt(c.center.real * k)}" cy="{_fmt(c.center.imag * k)}" '
                     f'r="{_fmt(c.radius * k)}"/>')
    lines.append("</g>")
    lines.append("</g>")
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")
