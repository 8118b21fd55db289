"""Plane geometry primitives: smallest enclosing circle, convex hull,
Voronoi cells as half-plane intersections, segment membership counting,
and ray/region exit queries."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import NamedTuple, Optional

EPS = 1e-12
EPS_SNAP = 1e-9


class GeometryError(ValueError):
    pass


class Point2(NamedTuple):
    x: float
    y: float


class Circle(NamedTuple):
    center: Point2
    radius: float


def sub(a: Point2, b: Point2) -> Point2:
    return Point2(a.x - b.x, a.y - b.y)


def add(a: Point2, b: Point2) -> Point2:
    return Point2(a.x + b.x, a.y + b.y)


def scale(a: Point2, s: float) -> Point2:
    return Point2(a.x * s, a.y * s)


def dot(a: Point2, b: Point2) -> float:
    return a.x * b.x + a.y * b.y


def cross(a: Point2, b: Point2) -> float:
    return a.x * b.y - a.y * b.x


def dist(a: Point2, b: Point2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def norm(a: Point2) -> float:
    return math.hypot(a.x, a.y)


def unit(a: Point2) -> Point2:
    n = norm(a)
    if n < EPS:
        raise GeometryError("cannot normalize zero vector")
    return Point2(a.x / n, a.y / n)


def rotate(a: Point2, angle: float) -> Point2:
    c, s = math.cos(angle), math.sin(angle)
    return Point2(a.x * c - a.y * s, a.x * s + a.y * c)


class HalfPlane(NamedTuple):
    """The set {p : normal . p <= offset}; normal is unit length."""

    normal: Point2
    offset: float

    @staticmethod
    def through(point: Point2, normal: Point2) -> "HalfPlane":
        n = unit(normal)
        return HalfPlane(n, dot(n, point))

    def contains(self, p: Point2, tol: float = EPS_SNAP) -> bool:
        return dot(self.normal, p) <= self.offset + tol


@dataclass(frozen=True)
class Region:
    """Convex region as an intersection of half-planes; empty list = whole plane."""

    halfplanes: tuple[HalfPlane, ...] = ()

    def contains(self, p: Point2, tol: float = EPS_SNAP) -> bool:
        return all(h.contains(p, tol) for h in self.halfplanes)


def point_to_segment_distance(p: Point2, a: Point2, b: Point2) -> float:
    ab = sub(b, a)
    ab_sq = dot(ab, ab)
    if ab_sq < EPS:
        return dist(p, a)
    t = dot(sub(p, a), ab) / ab_sq
    t = max(0.0, min(1.0, t))
    closest = Point2(a.x + t * ab.x, a.y + t * ab.y)
    return dist(p, closest)


# --- smallest enclosing circle (randomized incremental) ---


def _circle_two(a: Point2, b: Point2) -> Circle:
    center = Point2((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
    return Circle(center, max(dist(center, a), dist(center, b)))


def _circumcircle(a: Point2, b: Point2, c: Point2) -> Optional[Circle]:
    ox = (min(a.x, b.x, c.x) + max(a.x, b.x, c.x)) / 2.0
    oy = (min(a.y, b.y, c.y) + max(a.y, b.y, c.y)) / 2.0
    ax, ay = a.x - ox, a.y - oy
    bx, by = b.x - ox, b.y - oy
    cx, cy = c.x - ox, c.y - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
              + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
              + (cx * cx + cy * cy) * (bx - ax)) / d
    center = Point2(x, y)
    return Circle(center, max(dist(center, a), dist(center, b), dist(center, c)))


def _in_circle(c: Optional[Circle], p: Point2) -> bool:
    return c is not None and dist(c.center, p) <= c.radius * (1 + 1e-14) + 1e-14


def smallest_enclosing_circle(points: list[Point2],
                              rng: Optional[random.Random] = None) -> Circle:
    if not points:
        raise GeometryError("empty point set")
    for p in points:
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            raise GeometryError("non-finite coordinate")
    pts = [Point2(float(p.x), float(p.y)) for p in points]
    if rng is None:
        rng = random.Random(0x5EC)
    rng.shuffle(pts)

    c: Optional[Circle] = None
    for i, p in enumerate(pts):
        if not _in_circle(c, p):
            c = _sec_one_point(pts[: i + 1], p)
    assert c is not None
    return c


def _sec_one_point(points: list[Point2], p: Point2) -> Circle:
    c = Circle(p, 0.0)
    for i, q in enumerate(points):
        if not _in_circle(c, q):
            if c.radius == 0.0:
                c = _circle_two(p, q)
            else:
                c = _sec_two_points(points[: i + 1], p, q)
    return c


def _sec_two_points(points: list[Point2], p: Point2, q: Point2) -> Circle:
    circ = _circle_two(p, q)
    left: Optional[Circle] = None
    right: Optional[Circle] = None
    pq = sub(q, p)
    for r in points:
        if _in_circle(circ, r):
            continue
        cr = cross(pq, sub(r, p))
        c = _circumcircle(p, q, r)
        if c is None:
            continue
        cc = cross(pq, sub(c.center, p))
        if cr > 0.0 and (left is None or cc > cross(pq, sub(left.center, p))):
            left = c
        elif cr < 0.0 and (right is None or cc < cross(pq, sub(right.center, p))):
            right = c
    if left is None and right is None:
        return circ
    if left is None:
        return right  # type: ignore[return-value]
    if right is None:
        return left
    return left if left.radius <= right.radius else right


# --- convex hull (monotone chain, counter-clockwise) ---


def convex_hull(points: list[Point2]) -> list[Point2]:
    if not points:
        raise GeometryError("empty point set")
    pts = sorted(set(Point2(float(p.x), float(p.y)) for p in points))
    if len(pts) == 1:
        return [pts[0]]
    if len(pts) == 2:
        return list(pts)

    def half(seq: list[Point2]) -> list[Point2]:
        out: list[Point2] = []
        for p in seq:
            while len(out) >= 2 and cross(sub(out[-1], out[-2]), sub(p, out[-2])) <= EPS:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:
        # all collinear: return the two extremes
        return [pts[0], pts[-1]]
    return hull


def convex_hull_region(points: list[Point2]) -> Optional[Region]:
    """Convex hull as a half-plane region, or None when the hull is
    degenerate (fewer than three vertices)."""
    hull = convex_hull(points)
    if len(hull) < 3:
        return None
    halfplanes = []
    for i in range(len(hull)):
        a, b = hull[i], hull[(i + 1) % len(hull)]
        d = sub(b, a)
        halfplanes.append(HalfPlane.through(a, Point2(d.y, -d.x)))
    return Region(tuple(halfplanes))


def point_in_hull(p: Point2, hull: list[Point2], tol: float = EPS_SNAP) -> bool:
    if len(hull) == 1:
        return dist(p, hull[0]) <= tol
    if len(hull) == 2:
        return point_to_segment_distance(p, hull[0], hull[1]) <= tol
    for i in range(len(hull)):
        a, b = hull[i], hull[(i + 1) % len(hull)]
        if cross(sub(b, a), sub(p, a)) < -tol * max(1.0, dist(a, b)):
            return False
    return True


# --- Voronoi cells as half-plane intersections ---


def dedupe_points(points: list[Point2], eps: float = EPS_SNAP) -> list[Point2]:
    out: list[Point2] = []
    for p in points:
        if all(dist(p, q) > eps for q in out):
            out.append(p)
    return out


def voronoi_cell(site: Point2, sites: list[Point2], eps: float = EPS_SNAP) -> Region:
    if all(dist(site, s) > eps for s in sites):
        raise GeometryError("site not among sites")
    halfplanes: list[HalfPlane] = []
    for s in dedupe_points(sites, eps):
        if dist(s, site) <= eps:
            continue
        mid = Point2((site.x + s.x) / 2.0, (site.y + s.y) / 2.0)
        halfplanes.append(HalfPlane.through(mid, sub(s, site)))
    return Region(tuple(halfplanes))


# --- segment membership counting ---


def robots_on_segment(p: Point2, q: Point2, positions: list[Point2], eps: float,
                      include_p: bool = False, include_q: bool = True) -> int:
    """Count positions within eps of segment p-q. By default positions
    coincident with p are excluded and those coincident with q included."""
    if dist(p, q) <= EPS_SNAP:
        raise GeometryError("degenerate segment")
    count = 0
    for r in positions:
        at_p = dist(r, p) <= eps
        at_q = dist(r, q) <= eps
        if at_p and not include_p:
            continue
        if at_q and not include_q:
            continue
        if point_to_segment_distance(r, p, q) <= eps:
            count += 1
    return count


# --- ray/region exit ---


def ray_region_exit(origin: Point2, direction: Point2,
                    region: Region) -> Optional[Point2]:
    """First boundary crossing of the ray origin + t*direction (t >= 0) out of
    the region, or None when the ray never exits (unbounded)."""
    if not region.contains(origin):
        raise GeometryError("ray origin outside region")
    d = unit(direction)
    t_exit = math.inf
    for h in region.halfplanes:
        denom = dot(h.normal, d)
        if denom <= EPS:
            continue  # ray parallel to or entering this half-plane
        t = (h.offset - dot(h.normal, origin)) / denom
        if t >= -EPS:
            t_exit = min(t_exit, max(t, 0.0))
    if math.isinf(t_exit):
        return None
    return Point2(origin.x + t_exit * d.x, origin.y + t_exit * d.y)
