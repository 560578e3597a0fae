"""Exact planar primitives: vectors, directions, convex polygons, clipping.

All predicates reduce to FieldScalar.sign().  Directions are never scaled to
unit length; a direction is a nonzero vector up to multiplication by a
positive real, canonically represented by dividing out the absolute value of
its first nonzero component.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dfield
from typing import Iterable, Optional, Sequence

from .field import Field, FieldScalar


class GeometryError(ValueError):
    pass


class NotConvex(GeometryError):
    pass


class DegenerateEdge(GeometryError):
    pass


@dataclass(frozen=True, slots=True)
class Vec2:
    x: FieldScalar
    y: FieldScalar

    def __add__(self, o: "Vec2") -> "Vec2":
        return Vec2(self.x + o.x, self.y + o.y)

    def __sub__(self, o: "Vec2") -> "Vec2":
        return Vec2(self.x - o.x, self.y - o.y)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def scale(self, s) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    def cross(self, o: "Vec2") -> FieldScalar:
        return self.x * o.y - self.y * o.x

    def dot(self, o: "Vec2") -> FieldScalar:
        return self.x * o.x + self.y * o.y

    def norm2(self) -> FieldScalar:
        return self.dot(self)

    def is_zero(self) -> bool:
        return self.x.is_zero() and self.y.is_zero()

    def key(self):
        return (self.x.key(), self.y.key())

    def __repr__(self):
        return f"({self.x!r},{self.y!r})"


def vec(field: Field, x, y) -> Vec2:
    return Vec2(field.scalar(x), field.scalar(y))


def vec_from_json(field: Field, obj) -> Vec2:
    from .field import scalar_from_json

    return Vec2(scalar_from_json(field, obj[0]), scalar_from_json(field, obj[1]))


def vec_to_json(v: Vec2):
    return [v.x.to_json(), v.y.to_json()]


class Direction:
    """A ray direction, exact up to positive scaling.

    The canonical representative divides by |first nonzero component|, so two
    directions compare equal iff one is a positive scalar multiple of the
    other, even across field-unit multiples.
    """

    __slots__ = ("vec", "_key")

    def __init__(self, v: Vec2):
        if v.is_zero():
            raise GeometryError("zero vector has no direction")
        sx = v.x.sign()
        m = abs(v.x) if sx != 0 else abs(v.y)
        canon = Vec2(v.x / m, v.y / m)
        object.__setattr__(self, "vec", canon)
        object.__setattr__(self, "_key", canon.key())

    def __setattr__(self, *a):
        raise AttributeError("Direction is immutable")

    def __eq__(self, o):
        return isinstance(o, Direction) and self._key == o._key

    def __hash__(self):
        return hash(self._key)

    def antipode(self) -> "Direction":
        return Direction(-self.vec)

    def cross_sign(self, o: "Direction") -> int:
        return self.vec.cross(o.vec).sign()

    def dot_sign(self, o: "Direction") -> int:
        return self.vec.dot(o.vec).sign()

    def half(self) -> int:
        """0 for the upper half plane [0, pi), 1 for the lower."""
        sy = self.vec.y.sign()
        if sy != 0:
            return 0 if sy > 0 else 1
        return 0 if self.vec.x.sign() > 0 else 1

    def integer_form(self) -> Optional[tuple]:
        """Primitive integer coordinates when both components are rational."""
        from math import gcd

        if self.vec.x.b != 0 or self.vec.y.b != 0:
            return None
        ax, ay = self.vec.x.a, self.vec.y.a
        d = ax.denominator * ay.denominator // gcd(
            ax.denominator, ay.denominator
        )
        ix = ax.numerator * (d // ax.denominator)
        iy = ay.numerator * (d // ay.denominator)
        g = gcd(abs(ix), abs(iy))
        return (ix // g, iy // g)

    def __repr__(self):
        f = self.integer_form()
        if f is not None:
            return f"dir({f[0]},{f[1]})"
        return f"dir{self.vec!r}"


def direction_cmp(a: Direction, b: Direction) -> int:
    """Total circular order starting at (1,0) counterclockwise."""
    ha, hb = a.half(), b.half()
    if ha != hb:
        return -1 if ha < hb else 1
    c = a.cross_sign(b)
    return -c


def sort_directions(ds: Iterable[Direction]) -> list:
    uniq = {}
    for d in ds:
        uniq[d._key] = d
    return sorted(uniq.values(), key=functools.cmp_to_key(direction_cmp))


def ccw_between(a: Direction, m: Direction, b: Direction) -> bool:
    """True iff m lies strictly inside the CCW arc from a to b (empty if a == b)."""
    if a == b or m == a or m == b:
        return False
    ab = direction_cmp(a, b)
    am = direction_cmp(a, m)
    mb = direction_cmp(m, b)
    if ab < 0:
        return am < 0 and mb < 0
    return am < 0 or mb < 0


class PointLocation:
    INTERIOR = "interior"
    EDGE = "edge"
    VERTEX = "vertex"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Located:
    kind: str
    index: int = -1


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon, vertices in counterclockwise order."""

    vertices: tuple
    was_reversed: bool = dfield(default=False, compare=False)

    @property
    def field(self) -> Field:
        return self.vertices[0].x.field

    def edges(self):
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    def area(self) -> FieldScalar:
        s = self.field.zero()
        for p, q in self.edges():
            s = s + p.cross(q)
        return s / 2

    def translate(self, v: Vec2) -> "ConvexPolygon":
        return ConvexPolygon(tuple(p + v for p in self.vertices))

    def scale(self, s) -> "ConvexPolygon":
        return ConvexPolygon(tuple(p.scale(s) for p in self.vertices))

    def transform(self, m) -> "ConvexPolygon":
        """Apply an exact 2x2 matrix ((a,b),(c,d)); must stay convex CCW."""
        (a, b), (c, d) = m
        pts = tuple(
            Vec2(p.x * a + p.y * b, p.x * c + p.y * d) for p in self.vertices
        )
        det = (a * d - b * c).sign()
        if det < 0:
            pts = tuple(reversed(pts))
        return ConvexPolygon(pts)

    def locate(self, p: Vec2) -> Located:
        verts = self.vertices
        n = len(verts)
        on_edges = []
        for i in range(n):
            u, v = verts[i], verts[(i + 1) % n]
            s = (v - u).cross(p - u).sign()
            if s < 0:
                return Located(PointLocation.OUTSIDE)
            if s == 0:
                on_edges.append(i)
        if not on_edges:
            return Located(PointLocation.INTERIOR)
        for i in on_edges:
            u, v = verts[i], verts[(i + 1) % n]
            e = v - u
            t = e.dot(p - u)
            if t.sign() == 0:
                return Located(PointLocation.VERTEX, i)
            if (t - e.norm2()).sign() == 0:
                return Located(PointLocation.VERTEX, (i + 1) % n)
            if 0 < t.sign() and (t - e.norm2()).sign() < 0:
                return Located(PointLocation.EDGE, i)
        return Located(PointLocation.OUTSIDE)

    def contains(self, p: Vec2) -> bool:
        return self.locate(p).kind != PointLocation.OUTSIDE

    def bbox(self):
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))

    def float_bbox(self):
        xs = [float(v.x) for v in self.vertices]
        ys = [float(v.y) for v in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))

    def dist2_to_point(self, p: Vec2) -> FieldScalar:
        """Exact squared distance from p to the closed polygon."""
        if self.contains(p):
            return self.field.zero()
        best = None
        for u, v in self.edges():
            e = v - u
            t = e.dot(p - u)
            if t.sign() <= 0:
                d2 = (p - u).norm2()
            elif (t - e.norm2()).sign() >= 0:
                d2 = (p - v).norm2()
            else:
                c = e.cross(p - u)
                d2 = c * c / e.norm2()
            if best is None or d2 < best:
                best = d2
        return best

    def key(self):
        return tuple(v.key() for v in self.vertices)


def polygon_make(points: Sequence[Vec2]) -> ConvexPolygon:
    """Validate a strictly convex polygon; clockwise input is reversed."""
    pts = list(points)
    if len(pts) < 3:
        raise GeometryError("need at least 3 vertices")
    for i, p in enumerate(pts):
        if (p - pts[i - 1]).is_zero():
            raise DegenerateEdge(f"repeated vertex at index {i}")
    n = len(pts)
    area2 = pts[0].x.field.zero()
    for i in range(n):
        area2 = area2 + pts[i].cross(pts[(i + 1) % n])
    s = area2.sign()
    if s == 0:
        raise NotConvex("zero area")
    reversed_input = s < 0
    if reversed_input:
        pts.reverse()
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        if (b - a).cross(c - b).sign() <= 0:
            raise NotConvex(f"vertex {i} is reflex or collinear")
    return ConvexPolygon(tuple(pts), was_reversed=reversed_input)


class Contact:
    NONE = "none"
    POINT = "point"
    SEGMENT = "segment"


@dataclass(frozen=True)
class ClipResult:
    kind: str  # "polygon" | "segment" | "point" | "empty"
    polygon: Optional[ConvexPolygon] = None
    points: tuple = ()

    @property
    def contact(self) -> str:
        if self.kind == "point":
            return Contact.POINT
        if self.kind == "segment":
            return Contact.SEGMENT
        return Contact.NONE

    def is_empty_region(self) -> bool:
        return self.kind != "polygon"


def _dedupe_ring(pts: list) -> list:
    out = []
    for p in pts:
        if not out or not (p - out[-1]).is_zero():
            out.append(p)
    if len(out) > 1 and (out[0] - out[-1]).is_zero():
        out.pop()
    return out


def convex_clip(p: ConvexPolygon, q: ConvexPolygon) -> ClipResult:
    """Exact intersection of two convex polygons (Sutherland-Hodgman).

    Lower-dimensional intersections are reported as segment or point
    contacts rather than errors.
    """
    pts = list(p.vertices)
    for a, b in q.edges():
        if not pts:
            break
        e = b - a
        nxt = []
        prev = pts[-1]
        prev_s = e.cross(prev - a).sign()
        for cur in pts:
            cur_s = e.cross(cur - a).sign()
            if prev_s >= 0:
                nxt.append(prev)
            if (prev_s > 0 and cur_s < 0) or (prev_s < 0 and cur_s > 0):
                d = cur - prev
                den = e.cross(d)
                t = e.cross(a - prev) / den
                nxt.append(prev + d.scale(t))
            prev, prev_s = cur, cur_s
        pts = nxt
    pts = _dedupe_ring(pts)
    if not pts:
        return ClipResult("empty")
    if len(pts) == 1:
        return ClipResult("point", points=tuple(pts))
    # drop collinear chain points, then classify
    n = len(pts)
    keep = []
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        if (b - a).cross(c - b).sign() != 0:
            keep.append(b)
    if len(keep) >= 3:
        return ClipResult("polygon", polygon=ConvexPolygon(tuple(keep)))
    # all points collinear: report the extreme pair exactly
    d = None
    for v in pts[1:]:
        if not (v - pts[0]).is_zero():
            d = v - pts[0]
            break
    if d is None:
        return ClipResult("point", points=(pts[0],))
    lo = hi = pts[0]
    for v in pts[1:]:
        if (v - lo).dot(d).sign() < 0:
            lo = v
        if (v - hi).dot(d).sign() > 0:
            hi = v
    return ClipResult("segment", points=(lo, hi))


@dataclass(frozen=True)
class SegmentClip:
    kind: str  # "interval" | "point" | "empty"
    t0: Optional[FieldScalar] = None
    t1: Optional[FieldScalar] = None


def segment_clip(poly: ConvexPolygon, base: Vec2, direction: Vec2) -> SegmentClip:
    """Exact chord {base + t*direction} cap poly as a t-interval.

    t is measured in units of the (un-normalized) direction vector.  Single
    point contacts are reported as kind "point".
    """
    if direction.is_zero():
        raise GeometryError("degenerate chord direction")
    f = poly.field
    lo: Optional[FieldScalar] = None
    hi: Optional[FieldScalar] = None
    for a, b in poly.edges():
        e = b - a
        beta = e.cross(direction)
        alpha = e.cross(base - a)
        bs = beta.sign()
        if bs == 0:
            if alpha.sign() < 0:
                return SegmentClip("empty")
            continue
        bound = -alpha / beta
        if bs > 0:
            if lo is None or bound > lo:
                lo = bound
        else:
            if hi is None or bound < hi:
                hi = bound
    if lo is None or hi is None:
        # line misses only if some parallel edge rejected earlier; a convex
        # polygon always yields both bounds otherwise
        return SegmentClip("empty")
    c = (hi - lo).sign()
    if c < 0:
        return SegmentClip("empty")
    if c == 0:
        return SegmentClip("point", lo, lo)
    return SegmentClip("interval", lo, hi)


def local_cone(poly: ConvexPolygon, p: Vec2):
    """Angular cone of poly at a boundary point p, or None if interior/outside.

    Returns (start Direction, end Direction) spanning the interior side
    counterclockwise, with arc strictly less than pi for a vertex and exactly
    pi for an edge point.
    """
    loc = poly.locate(p)
    if loc.kind == PointLocation.INTERIOR:
        return "full"
    if loc.kind == PointLocation.OUTSIDE:
        return None
    verts = poly.vertices
    n = len(verts)
    if loc.kind == PointLocation.EDGE:
        u, v = verts[loc.index], verts[(loc.index + 1) % n]
        d = Direction(v - u)
        return (d, d.antipode())
    i = loc.index
    nxt = verts[(i + 1) % n] - verts[i]
    prv = verts[i - 1] - verts[i]
    return (Direction(nxt), Direction(prv))


def cones_cover_circle(cones) -> bool:
    """Whether interior-disjoint cones at a common apex tile the full circle."""
    if any(c == "full" for c in cones):
        return True
    cones = [c for c in cones if c]
    if not cones:
        return False
    starts = sort_directions([c[0] for c in cones])
    if len(starts) != len(cones):
        return False
    by_start = {c[0]: c for c in cones}
    for i, s in enumerate(starts):
        end = by_start[s][1]
        if end != starts[(i + 1) % len(starts)]:
            return False
    return True


@dataclass(frozen=True)
class DirectionArc:
    """Closed arc of directions from start to end counterclockwise.

    start == end encodes a single direction; full=True the whole circle.
    """

    start: Direction
    end: Direction
    full: bool = False

    def contains(self, d: Direction) -> bool:
        if self.full:
            return True
        if d == self.start or d == self.end:
            return True
        if self.start == self.end:
            return False
        return ccw_between(self.start, d, self.end)


def radial_blocked(
    obstacles: Sequence[ConvexPolygon], t0, t1, d: Direction
) -> bool:
    """Whether the closed segment {t*d.vec : t in [t0,t1]} meets an obstacle."""
    for ob in obstacles:
        origin = Vec2(ob.field.zero(), ob.field.zero())
        clip = segment_clip(ob, origin, d.vec)
        if clip.kind == "empty":
            continue
        if not (clip.t1 < t0 or clip.t0 > t1):
            return True
    return False


def _compass(field: Field):
    one = field.one()
    z = field.zero()
    out = []
    for x, y in ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)):
        out.append(Direction(Vec2(
            one * x if x else z, one * y if y else z)))
    return out


def arc_cover(
    obstacles: Sequence[ConvexPolygon], t0, t1,
    dir_probe: Optional[Direction] = None,
):
    """Blocked directions for radial segments over [t0, t1].

    With dir_probe, returns the exact blocked/free boolean for that one
    direction.  Otherwise returns the list of maximal closed DirectionArcs of
    blocked directions, with endpoints taken from obstacle vertex directions
    and chord events at the radial parameter bounds.
    """
    if dir_probe is not None:
        return radial_blocked(obstacles, t0, t1, dir_probe)
    if not obstacles:
        return []
    f = obstacles[0].field
    t0 = t0 if isinstance(t0, FieldScalar) else f.scalar(t0)
    t1 = t1 if isinstance(t1, FieldScalar) else f.scalar(t1)
    cands = list(_compass(f))
    for ob in obstacles:
        for v in ob.vertices:
            if not v.is_zero():
                cands.append(Direction(v))
        # chord endpoints crossing the radial-parameter bounds: the canonical
        # parameter of a point is |x| (or |y| on the axis), so events happen
        # where edges cross the four vertical lines x = +-t0, +-t1
        for a, b in ob.edges():
            dxa, dxb = a.x, b.x
            for c in (t0, -t0, t1, -t1):
                den = dxb - dxa
                if den.sign() == 0:
                    continue
                s = (c - dxa) / den
                if 0 <= s.sign() and (s - 1).sign() <= 0:
                    pt = a + (b - a).scale(s)
                    if not pt.is_zero():
                        cands.append(Direction(pt))
    cands = sort_directions(cands)
    blocked_pt = [radial_blocked(obstacles, t0, t1, d) for d in cands]
    n = len(cands)
    blocked_mid = []
    for i in range(n):
        mid = Direction(cands[i].vec + cands[(i + 1) % n].vec)
        blocked_mid.append(radial_blocked(obstacles, t0, t1, mid))
    arcs = []
    # walk maximal blocked runs over the alternating point/arc circle
    items = []
    for i in range(n):
        items.append(("pt", i, blocked_pt[i]))
        items.append(("mid", i, blocked_mid[i]))
    if all(b for _, _, b in items):
        return [DirectionArc(cands[0], cands[0], full=True)]
    # rotate so the walk starts at an unblocked item
    start = next(i for i, it in enumerate(items) if not it[2])
    items = items[start:] + items[:start]
    run = []
    for kind, i, b in items:
        if b:
            if kind == "pt":
                run.append(i)
            elif not run:
                run.append(i)  # arc blocked: opens at its left endpoint
                run.append((i + 1) % n)
            else:
                run.append((i + 1) % n)
        else:
            if run:
                arcs.append(DirectionArc(cands[run[0]], cands[run[-1]]))
                run = []
    if run:
        arcs.append(DirectionArc(cands[run[0]], cands[run[-1]]))
    return arcs
