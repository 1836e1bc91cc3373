"""Planar geometry primitives: poses, polygons, segment math.

Conventions used everywhere in the package:

* coordinates are meters, x east / y north;
* headings are degrees in [0, 360), 0 = north (+y), increasing clockwise;
* relative bearings are degrees in (-180, 180], negative = left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_heading(self.heading))

    @property
    def position(self):
        return (self.x, self.y)


def normalize_heading(deg):
    """Map any angle into [0, 360)."""
    h = deg % 360.0
    return h if h != 360.0 else 0.0


def heading_vector(heading):
    """Unit direction for a clockwise-from-north heading."""
    rad = math.radians(heading)
    return (math.sin(rad), math.cos(rad))


def bearing_to(origin, target):
    """Absolute bearing (degrees, [0, 360)) from origin to target."""
    dx = target[0] - origin[0]
    dy = target[1] - origin[1]
    return normalize_heading(math.degrees(math.atan2(dx, dy)))


def relative_bearing(bearing, heading):
    """Signed offset of a bearing from a heading, in (-180, 180]."""
    b = (bearing - heading) % 360.0
    if b > 180.0:
        b -= 360.0
    return b


def as_polygon(points):
    """Coerce a vertex list to a (V, 2) float64 array."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise ValueError("polygon needs at least 3 [x, y] vertices")
    return arr


def signed_area(poly):
    x = poly[:, 0]
    y = poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def ensure_ccw(poly):
    """Return the polygon with counter-clockwise vertex order."""
    return poly if signed_area(poly) >= 0 else poly[::-1].copy()


def polygon_centroid(poly):
    """Area-weighted centroid of a simple polygon."""
    x = poly[:, 0]
    y = poly[:, 1]
    xn = np.roll(x, -1)
    yn = np.roll(y, -1)
    cross = x * yn - xn * y
    a = cross.sum() / 2.0
    if a == 0.0:
        return (float(x.mean()), float(y.mean()))
    cx = float(((x + xn) * cross).sum() / (6.0 * a))
    cy = float(((y + yn) * cross).sum() / (6.0 * a))
    return (cx, cy)


def polygon_edges(poly):
    """Edges as an (V, 4) array of (x1, y1, x2, y2) rows."""
    nxt = np.roll(poly, -1, axis=0)
    return np.hstack([poly, nxt])


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax, ay, bx, by, px, py):
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def segments_intersect(a1, a2, b1, b2):
    """True if closed segments a1-a2 and b1-b2 share any point."""
    d1 = _orient(*b1, *b2, *a1)
    d2 = _orient(*b1, *b2, *a2)
    d3 = _orient(*a1, *a2, *b1)
    d4 = _orient(*a1, *a2, *b2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and _on_segment(*b1, *b2, *a1):
        return True
    if d2 == 0 and _on_segment(*b1, *b2, *a2):
        return True
    if d3 == 0 and _on_segment(*a1, *a2, *b1):
        return True
    if d4 == 0 and _on_segment(*a1, *a2, *b2):
        return True
    return False


def polygon_is_simple(poly):
    """No repeated vertices, no zero-length edges, no edge crossings.

    Adjacent edges may share only their common endpoint; any other contact
    between edges makes the polygon non-simple.
    """
    n = poly.shape[0]
    for i in range(n):
        if np.array_equal(poly[i], poly[(i + 1) % n]):
            return False
    for i in range(n):
        a1 = tuple(poly[i])
        a2 = tuple(poly[(i + 1) % n])
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            b1 = tuple(poly[j])
            b2 = tuple(poly[(j + 1) % n])
            if segments_intersect(a1, a2, b1, b2):
                return False
    return True


def point_in_polygon(point, poly):
    """Boundary-inclusive even-odd containment for a single point."""
    px = np.array([point[0]], dtype=np.float64)
    py = np.array([point[1]], dtype=np.float64)
    return bool(kernels.points_in_polygon(px, py, poly)[0])


def point_segment_distance(px, py, x1, y1, x2, y2):
    ex = x2 - x1
    ey = y2 - y1
    seg_len2 = ex * ex + ey * ey
    if seg_len2 == 0.0:
        return math.hypot(px - x1, py - y1)
    t = ((px - x1) * ex + (py - y1) * ey) / seg_len2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (x1 + t * ex), py - (y1 + t * ey))


def point_polygon_distance(point, poly):
    """Distance from a point to a polygon; 0 when inside or on the boundary."""
    if point_in_polygon(point, poly):
        return 0.0
    px, py = point
    edges = polygon_edges(poly)
    return min(point_segment_distance(px, py, *edge) for edge in edges)


def polygons_overlap(a, b):
    """True if simple polygons a and b share any point (boundaries count)."""
    ea = polygon_edges(a)
    eb = polygon_edges(b)
    for i in range(ea.shape[0]):
        for j in range(eb.shape[0]):
            if segments_intersect(
                (ea[i, 0], ea[i, 1]),
                (ea[i, 2], ea[i, 3]),
                (eb[j, 0], eb[j, 1]),
                (eb[j, 2], eb[j, 3]),
            ):
                return True
    return point_in_polygon(tuple(a[0]), b) or point_in_polygon(tuple(b[0]), a)
