"""Enumeration of substitution-periodic tilings up to a period bound.

A tiling fixed by the k-fold substitution is represented by its point
configuration at the origin.  Every such tiling arises from a configuration
type C with an occurrence C + s inside the k-fold image of C: the offset
x = s / (lambda^k - 1) translates C onto the unique placement fixed by the
map, and the anchor conditions certify that the translated configuration
really is the full zero-patch of the generated tiling.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Dict, List, Optional

from .closure import (
    Closure,
    ConfigurationType,
    INTERIOR,
    adjacency_closure,
    point_covered,
    tiles_at_point,
)
from .field import FieldScalar
from .fixed import FixedTilingHandle, SeedNotNested
from .geometry import Vec2
from .system import Patch, SubstitutionSystem, SystemError, Tile


def fixed_point_offset(system: SubstitutionSystem, s: Vec2, k: int) -> Vec2:
    """The unique x with (C - x) contained in its own k-fold image, given
    an occurrence shifted by s."""
    denom = system.lam_pow(k) - 1
    return Vec2(s.x / denom, s.y / denom)


@dataclass
class PeriodicTiling:
    system: SubstitutionSystem
    seed: Patch
    min_period: int
    provenance: tuple  # (config kind, occurrence shift, solved offset)
    index: int = -1
    name: str = ""
    handle: FixedTilingHandle = dfield(init=False, repr=False)

    def __post_init__(self):
        self.handle = FixedTilingHandle(self.system, self.seed, self.min_period)

    def key(self):
        return self.seed.key()

    def __repr__(self):
        return f"PeriodicTiling({self.name or self.index}, k={self.min_period})"


def _anchor_ok(system: SubstitutionSystem, seed: Patch, k: int) -> bool:
    f = system.field
    origin = Vec2(f.zero(), f.zero())
    for t in seed:
        if not system.support(t).contains(origin):
            return False
    if not point_covered(system, list(seed), origin):
        return False
    image = system.substitute(seed, k)
    b0 = Patch(tiles_at_point(system, image, origin))
    return b0 == seed


def _minimal_period(system: SubstitutionSystem, seed: Patch, k_found: int) -> int:
    for k in range(1, k_found):
        if seed.issubset(system.substitute(seed, k)) and _anchor_ok(system, seed, k):
            return k
    return k_found


def enumerate_periodic(
    system: SubstitutionSystem,
    k_max: int = 6,
    closure: Optional[Closure] = None,
) -> List[PeriodicTiling]:
    """All tilings fixed by some power k <= k_max of the substitution.

    Complete up to the period bound: the zero-patch of any such tiling is an
    interior, edge, or vertex configuration with an occurrence inside its own
    k-fold image, and every occurrence of every type is scanned.
    """
    if closure is None:
        closure = adjacency_closure(system)
    f = system.field
    origin = Vec2(f.zero(), f.zero())
    configs: List[ConfigurationType] = [
        ConfigurationType(INTERIOR, Patch([Tile(i, origin)]))
        for i in range(len(system.prototiles))
    ]
    configs.extend(closure.all_configs())

    found: Dict[tuple, PeriodicTiling] = {}
    for k in range(1, k_max + 1):
        for cfg in configs:
            image = system.substitute(cfg.patch, k)
            anchor_tile = cfg.patch.tiles[0]
            for t in image:
                if t.proto != anchor_tile.proto:
                    continue
                s = t.shift - anchor_tile.shift
                if not cfg.patch.translate(s).issubset(image):
                    continue
                x = fixed_point_offset(system, s, k)
                seed = cfg.patch.translate(-x)
                if not _anchor_ok(system, seed, k):
                    continue
                key = seed.key()
                if key in found:
                    continue
                kmin = _minimal_period(system, seed, k)
                found[key] = PeriodicTiling(
                    system, seed, kmin, (cfg.kind, s, x)
                )
    out = sorted(found.values(), key=lambda p: (p.min_period, p.key()))
    for i, p in enumerate(out):
        p.index = i
        p.name = f"t{i}"
    return out


def apply_phi(
    enumerated: List[PeriodicTiling], tiling: PeriodicTiling, n: int
) -> Optional[PeriodicTiling]:
    """The substitution image Phi^n of a periodic tiling, located in the
    enumerated list (n may be negative)."""
    system = tiling.system
    k = tiling.min_period
    m = n % k
    if m == 0:
        return tiling
    f = system.field
    origin = Vec2(f.zero(), f.zero())
    image = system.substitute(tiling.seed, m)
    seed = Patch(tiles_at_point(system, image, origin))
    for p in enumerated:
        if p.seed == seed:
            return p
    return None


def translation_period_warning(tiling: PeriodicTiling) -> Optional[Vec2]:
    """Diagnostic for translation-periodic (toral) systems.

    Looks for a nonzero v such that translating a two-supertile-scale ball of
    T by v lands inside T again.  Aperiodic inputs fail this at some radius;
    the check is a warning, not a proof, and is tuned to catch grids.
    """
    system = tiling.system
    k = tiling.min_period
    seed = tiling.seed
    d = system.field.scalar(system.diameter_upper_bound())
    near = tiling.handle.ball(d * 2)
    lam2k = system.lam_pow(2 * k)
    big_r = d * 2 * lam2k
    big = tiling.handle.ball(big_r)
    probe = tiling.handle.ball(d * 2 * system.lam_pow(k))
    anchor = seed.tiles[0]
    for t in near:
        if t.proto != anchor.proto:
            continue
        v = t.shift - anchor.shift
        if v.is_zero():
            continue
        if not seed.translate(v).issubset(near.union(big)):
            continue
        if all(t2.translate(v) in big for t2 in probe):
            return v
    return None
