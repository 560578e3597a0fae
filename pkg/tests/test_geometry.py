import random
from fractions import Fraction

import pytest

from tessera.field import field_make
from tessera.geometry import (
    Contact,
    Direction,
    NotConvex,
    PointLocation,
    Vec2,
    arc_cover,
    ccw_between,
    cones_cover_circle,
    convex_clip,
    local_cone,
    polygon_make,
    segment_clip,
    sort_directions,
    vec,
)

Q = field_make(1, (2, 0))
SQRT3 = field_make(2, (0, 3))


def square(f, x0, y0, side=1):
    return polygon_make([
        vec(f, x0, y0),
        vec(f, x0 + side, y0),
        vec(f, x0 + side, y0 + side),
        vec(f, x0, y0 + side),
    ])


def test_polygon_make_unit_square():
    sq = square(Q, 0, 0)
    assert sq.area().as_fraction() == 1
    assert not sq.was_reversed
    cw = polygon_make([vec(Q, 0, 0), vec(Q, 0, 1), vec(Q, 1, 1), vec(Q, 1, 0)])
    assert cw.was_reversed
    assert cw.area().as_fraction() == 1


def test_polygon_make_rejects_collinear():
    with pytest.raises(NotConvex):
        polygon_make([
            vec(Q, 0, 0), vec(Q, Fraction(1, 2), 0), vec(Q, 1, 0),
            vec(Q, 1, 1), vec(Q, 0, 1),
        ])


def test_halfhex_trapezoid_area():
    f = SQRT3
    h = f.scalar(0, Fraction(1, 2))  # sqrt(3)/2
    trap = polygon_make([
        Vec2(f.scalar(1), f.zero()),
        Vec2(f.scalar(Fraction(1, 2)), h),
        Vec2(f.scalar(Fraction(-1, 2)), h),
        Vec2(f.scalar(-1), f.zero()),
    ])
    assert trap.area().key() == f.scalar(0, Fraction(3, 4)).key()


def test_point_locate():
    sq = square(Q, 0, 0)
    assert sq.locate(vec(Q, Fraction(1, 2), Fraction(1, 2))).kind == PointLocation.INTERIOR
    assert sq.locate(vec(Q, 1, Fraction(1, 2))).kind == PointLocation.EDGE
    assert sq.locate(vec(Q, 2, 0)).kind == PointLocation.OUTSIDE
    assert sq.locate(vec(Q, 0, 0)).kind == PointLocation.VERTEX


def test_convex_clip_examples():
    a = square(Q, 0, 0)
    b = square(Q, 1, 0)
    r = convex_clip(a, b)
    assert r.is_empty_region() and r.contact == Contact.SEGMENT
    same = convex_clip(a, a)
    assert same.kind == "polygon"
    assert same.polygon.area().as_fraction() == 1
    c = square(Q, Fraction(1, 2), 0)
    r2 = convex_clip(a, c)
    assert r2.kind == "polygon"
    assert r2.polygon.area().as_fraction() == Fraction(1, 2)
    corner = convex_clip(a, square(Q, 1, 1))
    assert corner.contact == Contact.POINT
    far = convex_clip(a, square(Q, 5, 5))
    assert far.contact == Contact.NONE


def test_convex_clip_symmetry_random():
    rng = random.Random(7)
    for _ in range(50):
        a = square(Q, Fraction(rng.randint(-4, 4), 2), Fraction(rng.randint(-4, 4), 2), 2)
        b = square(Q, rng.randint(-3, 3), rng.randint(-3, 3), 2)
        r1 = convex_clip(a, b)
        r2 = convex_clip(b, a)
        assert r1.kind == r2.kind
        if r1.kind == "polygon":
            assert r1.polygon.area().key() == r2.polygon.area().key()


def test_area_additivity_under_halfplane_split():
    # split the square by x = 1/2 and compare exact areas
    sq = square(Q, 0, 0)
    left = polygon_make([vec(Q, -1, -1), vec(Q, Fraction(1, 2), -1),
                         vec(Q, Fraction(1, 2), 2), vec(Q, -1, 2)])
    right = polygon_make([vec(Q, Fraction(1, 2), -1), vec(Q, 2, -1),
                          vec(Q, 2, 2), vec(Q, Fraction(1, 2), 2)])
    a1 = convex_clip(sq, left).polygon.area()
    a2 = convex_clip(sq, right).polygon.area()
    assert (a1 + a2).key() == sq.area().key()


def test_segment_clip_examples():
    sq = square(Q, 0, 0)
    r = segment_clip(sq, vec(Q, 0, Fraction(1, 2)), vec(Q, 1, 0))
    assert r.kind == "interval"
    assert r.t0.as_fraction() == 0 and r.t1.as_fraction() == 1
    diag = segment_clip(sq, vec(Q, 0, 0), vec(Q, 1, 1))
    assert diag.kind == "interval"
    assert diag.t0.as_fraction() == 0 and diag.t1.as_fraction() == 1
    miss = segment_clip(sq, vec(Q, 0, 2), vec(Q, 1, 0))
    assert miss.kind == "empty"
    touch = segment_clip(sq, vec(Q, 0, 1), vec(Q, 1, 1))
    assert touch.kind == "point"
    assert touch.t0.as_fraction() == 0


def test_directions_canonical():
    d1 = Direction(vec(Q, 2, 2))
    d2 = Direction(vec(Q, 5, 5))
    assert d1 == d2
    assert d1 != d1.antipode()
    assert d1.integer_form() == (1, 1)
    w = SQRT3.omega()
    d3 = Direction(Vec2(w, w))
    d4 = Direction(Vec2(SQRT3.one(), SQRT3.one()))
    assert d3 == d4  # field-unit multiple of the same ray


def test_direction_order_and_between():
    e = Direction(vec(Q, 1, 0))
    ne = Direction(vec(Q, 1, 1))
    n = Direction(vec(Q, 0, 1))
    w = Direction(vec(Q, -1, 0))
    s = Direction(vec(Q, 0, -1))
    assert sort_directions([n, e, s, w, ne]) == [e, ne, n, w, s]
    assert ccw_between(e, ne, n)
    assert not ccw_between(n, ne, e) or not ccw_between(e, n, ne)
    assert ccw_between(w, s, e)


def test_local_cone_cover():
    tiles = [square(Q, 0, 0), square(Q, -1, 0), square(Q, -1, -1), square(Q, 0, -1)]
    origin = vec(Q, 0, 0)
    cones = [local_cone(t, origin) for t in tiles]
    assert cones_cover_circle(cones)
    assert not cones_cover_circle(cones[:3])
    inside = local_cone(square(Q, 0, 0), vec(Q, Fraction(1, 2), Fraction(1, 3)))
    assert inside == "full"


def test_arc_cover_examples():
    far = square(Q, 10, -1, 2)  # obstacle straddling the +x axis
    arcs = arc_cover([far], Q.scalar(1), Q.scalar(40))
    assert len(arcs) == 1
    assert arcs[0].contains(Direction(vec(Q, 1, 0)))
    assert not arcs[0].contains(Direction(vec(Q, 0, 1)))
    assert arc_cover([], Q.scalar(1), Q.scalar(40)) == []
    probe = arc_cover([far], Q.scalar(1), Q.scalar(40), Direction(vec(Q, 1, 0)))
    assert probe is True
    # thin sliver hugging the (1,1) ray: blocked arc pinches onto that direction
    eps = Fraction(1, 1000)
    sliver = polygon_make([
        vec(Q, 1, 1), vec(Q, 2, 2 - eps), vec(Q, 4, 4 - eps), vec(Q, 3, 3),
    ])
    arcs = arc_cover([sliver], Q.scalar(1), Q.scalar(100))
    assert len(arcs) == 1
    assert arcs[0].contains(Direction(vec(Q, 1, 1))) or arcs[0].start == Direction(
        vec(Q, 1, 1)
    )


def test_arc_cover_monotone():
    a = square(Q, 10, 3, 2)
    b = square(Q, -8, -8, 2)
    one, forty = Q.scalar(1), Q.scalar(40)
    arcs_a = arc_cover([a], one, forty)
    arcs_ab = arc_cover([a, b], one, forty)
    samples = [Direction(vec(Q, x, y)) for x in range(-3, 4) for y in range(-3, 4)
               if (x, y) != (0, 0)]
    for d in samples:
        if any(arc.contains(d) for arc in arcs_a):
            assert any(arc.contains(d) for arc in arcs_ab)
        assert any(arc.contains(d) for arc in arcs_ab) == arc_cover(
            [a, b], one, forty, d
        )
