"""Local configuration types: adjacency closure and collaring.

The closure computes every two-tile edge adjacency and every vertex star
that occurs in the tiling space, as the least fixpoint seeded from the
substitution rules: configurations harvested strictly inside supertiles are
genuine, and substituting a known configuration exposes the configurations
of the next level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .field import FieldScalar
from .geometry import (
    PointLocation,
    Vec2,
    cones_cover_circle,
    convex_clip,
    local_cone,
    segment_clip,
)
from .system import Patch, Prototile, SubstitutionSystem, SystemError, Tile


class ClosureBudgetExceeded(SystemError):
    pass


class CollarNotDetermined(SystemError):
    pass


INTERIOR = "interior"
EDGE = "edge"
VERTEX = "vertex"


@dataclass(frozen=True)
class ConfigurationType:
    """Point configuration anchored at the origin.

    kind interior: one tile whose support contains 0 (position solved later,
    so the canonical patch just centers the prototile's first vertex).
    kind edge: two tiles sharing a segment, anchored at the segment midpoint.
    kind vertex: a full star of tiles around a common vertex at 0.
    """

    kind: str
    patch: Patch

    def key(self):
        return (self.kind, self.patch.key())


def tiles_at_point(system: SubstitutionSystem, patch: Patch, p: Vec2) -> List[Tile]:
    px, py = float(p.x), float(p.y)
    out = []
    for t in patch:
        x0, y0, x1, y1 = system.support(t).float_bbox()
        if not (x0 - 1e-9 <= px <= x1 + 1e-9 and y0 - 1e-9 <= py <= y1 + 1e-9):
            continue
        if system.support(t).contains(p):
            out.append(t)
    return out


def point_covered(system: SubstitutionSystem, tiles: List[Tile], p: Vec2) -> bool:
    cones = [local_cone(system.support(t), p) for t in tiles]
    return cones_cover_circle(cones)


def star_kind(system: SubstitutionSystem, tiles: List[Tile], p: Vec2) -> str:
    for t in tiles:
        if system.support(t).locate(p).kind == PointLocation.VERTEX:
            return VERTEX
    if len(tiles) == 2:
        return EDGE
    return INTERIOR if len(tiles) == 1 else VERTEX


def normalize_config(kind: str, tiles: List[Tile], anchor: Vec2) -> ConfigurationType:
    return ConfigurationType(kind, Patch([t.translate(-anchor) for t in tiles]))


def harvest_configs(system: SubstitutionSystem, patch: Patch):
    """All edge pairs and complete vertex stars visible inside a patch.

    Vertex stars are only harvested where the star covers a neighborhood of
    its point, which certifies the configuration is complete.
    """
    edge_types = {}
    vertex_types = {}
    pts = {}
    tiles = list(patch)
    for t in tiles:
        for v in system.support(t).vertices:
            pts[v.key()] = v
    for v in pts.values():
        at = tiles_at_point(system, patch, v)
        if len(at) < 2:
            continue
        if point_covered(system, at, v):
            cfg = normalize_config(VERTEX, at, v)
            vertex_types[cfg.key()] = cfg
    for i in range(len(tiles)):
        si = system.support(tiles[i])
        bi = si.float_bbox()
        for j in range(i + 1, len(tiles)):
            sj = system.support(tiles[j])
            bj = sj.float_bbox()
            if (bi[2] < bj[0] - 1e-9 or bj[2] < bi[0] - 1e-9
                    or bi[3] < bj[1] - 1e-9 or bj[3] < bi[1] - 1e-9):
                continue
            clip = convex_clip(si, sj)
            if clip.kind == "segment":
                lo, hi = clip.points
                mid = Vec2((lo.x + hi.x) / 2, (lo.y + hi.y) / 2)
                cfg = normalize_config(EDGE, [tiles[i], tiles[j]], mid)
                edge_types[cfg.key()] = cfg
    return edge_types, vertex_types


@dataclass
class Closure:
    edge_types: Dict[tuple, ConfigurationType]
    vertex_types: Dict[tuple, ConfigurationType]

    def all_configs(self) -> List[ConfigurationType]:
        return list(self.edge_types.values()) + list(self.vertex_types.values())


def adjacency_closure(system: SubstitutionSystem, cap: int = 10000) -> Closure:
    """Least fixpoint of allowed edge pairs and vertex stars."""
    edge_types: Dict[tuple, ConfigurationType] = {}
    vertex_types: Dict[tuple, ConfigurationType] = {}
    queue: List[ConfigurationType] = []

    def absorb(e, v):
        for k, cfg in e.items():
            if k not in edge_types:
                edge_types[k] = cfg
                queue.append(cfg)
        for k, cfg in v.items():
            if k not in vertex_types:
                vertex_types[k] = cfg
                queue.append(cfg)

    for rule in system.rules:
        absorb(*harvest_configs(system, rule))
    while queue:
        if len(edge_types) + len(vertex_types) > cap:
            raise ClosureBudgetExceeded(
                f"more than {cap} configuration types; input looks invalid"
            )
        cfg = queue.pop()
        absorb(*harvest_configs(system, system.substitute(cfg.patch, 1)))
    return Closure(edge_types, vertex_types)


# -- collaring ---------------------------------------------------------------


def _touching(system, patch: Patch, t: Tile) -> List[Tile]:
    st = system.support(t)
    bb = st.float_bbox()
    out = []
    for o in patch:
        if o.key() == t.key():
            continue
        so = system.support(o)
        ob = so.float_bbox()
        if (bb[2] < ob[0] - 1e-9 or ob[2] < bb[0] - 1e-9
                or bb[3] < ob[1] - 1e-9 or ob[3] < bb[1] - 1e-9):
            continue
        if convex_clip(st, so).kind != "empty":
            out.append(o)
    return out


def _collar_complete(system, t: Tile, neighbors: List[Tile]) -> bool:
    """Whether t plus neighbors covers a neighborhood of the boundary of t."""
    st = system.support(t)
    local = [t] + neighbors
    for v in st.vertices:
        at = [o for o in local if system.support(o).contains(v)]
        if not point_covered(system, at, v):
            return False
    f = system.field
    for a, b in st.edges():
        d = b - a
        # neighbor chords along the edge must cover [0, 1] in edge params
        ivals = []
        for o in neighbors:
            clip = convex_clip(st, system.support(o))
            if clip.kind != "segment":
                continue
            lo, hi = clip.points
            c = (lo - a).cross(d)
            if c.sign() != 0 or (hi - a).cross(d).sign() != 0:
                continue
            n2 = d.norm2()
            t0 = (lo - a).dot(d) / n2
            t1 = (hi - a).dot(d) / n2
            if t0 > t1:
                t0, t1 = t1, t0
            ivals.append((t0, t1))
        ivals.sort(key=lambda iv: float(iv[0]))
        reach = f.zero()
        for t0, t1 in ivals:
            if t0 > reach:
                return False
            if t1 > reach:
                reach = t1
        if reach < f.one():
            return False
    return True


def _collar_key(system, t: Tile, neighbors: List[Tile]):
    rel = tuple(sorted((o.proto, (o.shift - t.shift).key()) for o in neighbors))
    return (t.proto, rel)


def collar_system(
    system: SubstitutionSystem, cap: int = 10000, seed_depth: int = 4
) -> Tuple[SubstitutionSystem, Dict[int, int]]:
    """The 1-collared system and the uncollaring map on prototile ids.

    New prototiles are translation classes of (tile, patch of all touching
    tiles); the child collar of a collared tile is read off inside the
    substituted collar patch, which determines the induced rules.
    """
    types: Dict[tuple, int] = {}
    reps: List[Tuple[Tile, List[Tile]]] = []

    def register(t: Tile, neighbors: List[Tile]) -> int:
        z = Vec2(system.field.zero(), system.field.zero()) - t.shift
        tt = t.translate(z)
        ns = [o.translate(z) for o in neighbors]
        key = _collar_key(system, tt, ns)
        if key not in types:
            if len(types) > cap:
                raise ClosureBudgetExceeded("collar type budget exceeded")
            types[key] = len(reps)
            reps.append((tt, ns))
        return types[key]

    found_seed = False
    for m in range(2, seed_depth + 1):
        for i in range(len(system.prototiles)):
            patch = system.substitute(Patch([Tile(i, Vec2(system.field.zero(),
                                                          system.field.zero()))]), m)
            for t in patch:
                nbrs = _touching(system, patch, t)
                if _collar_complete(system, t, nbrs):
                    register(t, nbrs)
                    found_seed = True
        if found_seed:
            break
    if not found_seed:
        raise CollarNotDetermined("no complete collar inside shallow supertiles")

    rules_out: Dict[int, List[Tuple[int, Vec2]]] = {}
    todo = list(range(len(reps)))
    while todo:
        idx = todo.pop()
        if idx in rules_out:
            continue
        t, ns = reps[idx]
        big = system.substitute(Patch([t] + ns), 1)
        children = system.substitute_tile(t)
        entry = []
        for c in children:
            cn = _touching(system, big, c)
            if not _collar_complete(system, c, cn):
                raise CollarNotDetermined(
                    f"child collar of type {idx} not determined by one "
                    f"substitution step"
                )
            before = len(reps)
            cid = register(c, cn)
            if cid >= before or cid not in rules_out:
                todo.append(cid)
            entry.append((cid, c.shift))
        rules_out[idx] = entry

    protos = []
    for cid, (t, _ns) in enumerate(reps):
        base = system.prototiles[t.proto]
        protos.append(Prototile(cid, f"{base.name}|c{cid}",
                                f"{base.mark}|c{cid}", base.support))
    rules = [Patch([Tile(cid, shift) for cid, shift in rules_out[i]])
             for i in range(len(reps))]
    collared = SubstitutionSystem(
        f"{system.name}~collared", system.field, system.lam, protos, rules
    )
    uncollar = {cid: reps[cid][0].proto for cid in range(len(reps))}
    return collared, uncollar
