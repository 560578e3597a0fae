"""Lazily expanded substitution-periodic tilings.

A handle holds a seed patch anchored at the origin with seed contained in
its own k-fold substitution image; the represented tiling is the increasing
union of the images.  Expansion depth is chosen by exact comparisons against
the squared inradius of the seed around the origin, so every returned patch
is provably complete for its query.
"""

from __future__ import annotations

from typing import List, Optional

from .field import FieldScalar
from .geometry import Vec2, cones_cover_circle, local_cone
from .system import Patch, SubstitutionSystem, SystemError, Tile


class SeedNotNested(SystemError):
    pass


class InsufficientCoverage(SystemError):
    pass


def patch_ball(system: SubstitutionSystem, patch: Patch, center: Vec2, r,
               coverage_r=None) -> Patch:
    """Tiles of the patch meeting the closed disk of radius r around center.

    r may be a FieldScalar or rational; comparison is by exact squared
    distance.  coverage_r, when given, is the radius out to which the caller
    knows the patch is complete; a query beyond it raises.
    """
    f = system.field
    r = r if isinstance(r, FieldScalar) else f.scalar(r)
    if r.sign() < 0:
        raise SystemError("negative radius")
    if coverage_r is not None and (r - coverage_r).sign() > 0:
        raise InsufficientCoverage(f"radius {r!r} beyond known coverage")
    r2 = r * r
    rf = float(r)
    cx, cy = float(center.x), float(center.y)
    out = []
    for t in patch:
        sup = system.support(t)
        x0, y0, x1, y1 = sup.float_bbox()
        if (cx < x0 - rf - 1e-6 or cx > x1 + rf + 1e-6
                or cy < y0 - rf - 1e-6 or cy > y1 + rf + 1e-6):
            continue
        if (sup.dist2_to_point(center) - r2).sign() <= 0:
            out.append(t)
    return Patch(out)


def _inball2(system: SubstitutionSystem, seed: Patch) -> FieldScalar:
    """Exact positive lower bound on dist(0, boundary of spt(seed))^2."""
    f = system.field
    origin = Vec2(f.zero(), f.zero())
    best: Optional[FieldScalar] = None
    for t in seed:
        sup = system.support(t)
        for v in sup.vertices:
            if not v.is_zero():
                d2 = v.norm2()
                if best is None or d2 < best:
                    best = d2
        for a, b in sup.edges():
            e = b - a
            c = e.cross(origin - a)
            if c.sign() == 0:
                continue  # edge line through 0: endpoints handled above
            t0 = e.dot(origin - a)
            if t0.sign() < 0 or (t0 - e.norm2()).sign() > 0:
                continue
            d2 = c * c / e.norm2()
            if best is None or d2 < best:
                best = d2
    if best is None or best.sign() <= 0:
        raise SeedNotNested("seed does not surround the origin")
    return best


class FixedTilingHandle:
    """T = union of Phi^{nk}(seed), with monotone cached expansion."""

    def __init__(self, system: SubstitutionSystem, seed: Patch, k: int):
        if k < 1:
            raise SystemError("period must be positive")
        self.system = system
        self.seed = seed
        self.k = k
        image = system.substitute(seed, k)
        if not seed.issubset(image):
            raise SeedNotNested("seed is not contained in its own image")
        f = system.field
        origin = Vec2(f.zero(), f.zero())
        cones = [local_cone(system.support(t), origin) for t in seed]
        if not cones_cover_circle(cones):
            raise SeedNotNested("seed does not cover a neighborhood of 0")
        self._inb2 = _inball2(system, seed)
        self._levels: List[Patch] = [seed]

    def level(self, n: int) -> Patch:
        while len(self._levels) <= n:
            self._levels.append(
                self.system.substitute(self._levels[-1], self.k)
            )
        return self._levels[n]

    def covered_r2(self, n: int) -> FieldScalar:
        s = self.system.lam_pow(n * self.k)
        return s * s * self._inb2

    def expand_covering_r2(self, r2: FieldScalar) -> Patch:
        """Smallest cached level whose support surely contains the r2-disk."""
        n = 0
        while (self.covered_r2(n) - r2).sign() < 0:
            n += 1
            if n > 64:
                raise SystemError("expansion runaway")
        return self.level(n)

    def ball(self, r) -> Patch:
        """B_r[T]: every tile whose support meets the closed r-disk at 0."""
        f = self.system.field
        r = r if isinstance(r, FieldScalar) else f.scalar(r)
        margin = f.scalar(self.system.diameter_upper_bound())
        reach = r + margin
        patch = self.expand_covering_r2(reach * reach)
        origin = Vec2(f.zero(), f.zero())
        return patch_ball(self.system, patch, origin, r)

    def point_config(self, x: Vec2) -> Patch:
        """All tiles of T containing x, as a patch anchored at x."""
        r2 = x.norm2()
        n = 0
        while (self.covered_r2(n) - r2).sign() <= 0:
            n += 1
            if n > 64:
                raise SystemError("expansion runaway")
        patch = self.level(n)
        from .closure import tiles_at_point

        tiles = tiles_at_point(self.system, patch, x)
        return Patch([t.translate(-x) for t in tiles])

    def b0(self) -> Patch:
        return self.seed
