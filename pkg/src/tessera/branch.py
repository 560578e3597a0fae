"""Asymptotic analysis of pairs of substitution-periodic tilings.

Stable equivalence of pointed tilings is decided by walking the orbit of
pointed zero-patches under the substitution: the next pointed patch is a
pure function of the current one, so equality, certified divergence (an
eventually periodic orbit of mismatched pointed pairs), or a cap verdict is
always reached.

Ray membership in an asymptotic sector is decided exactly on one fundamental
interval [a, lambda^k a] of the ray: stable equivalence is invariant under
the k-fold substitution, which scales the ray by lambda^k, so the interval
verdict propagates to the whole ray.  The interval is split into cells by
tile crossings; each cell either resolves (all descendants agree), reaches a
cycle of mismatched cell classes (a certified mismatch point survives in the
nest), or hits the depth cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .closure import tiles_at_point
from .field import FieldScalar
from .fixed import patch_ball
from .geometry import (
    Direction,
    DirectionArc,
    Vec2,
    ccw_between,
    direction_cmp,
    segment_clip,
    sort_directions,
)
from .periodic import PeriodicTiling
from .system import Patch, SubstitutionSystem, Tile

RELATED = "related"
UNRELATED = "unrelated"
UNDETERMINED = "undetermined"

IN_SECTOR = "in"
OUT_SECTOR = "out"

ISOLATED = "isolated"
CORNER = "corner"
LINE = "line"
NOT_BRANCH = "none"


@dataclass
class Caps:
    n_max: int = 64
    point_n_max: int = 24  # pointed steps for cut points inside cell graphs
    cell_depth: int = 14  # graph expansion depth before capping
    cell_budget: int = 400  # fresh cell classes explored per ray query
    coord_bits: int = 220  # pointed walks abort once coordinates blow up
    base_scale: Fraction = Fraction(1)
    candidate_levels: int = 1
    region_iters: int = 8
    probe_points: int = 16  # rational pointed probes per ray before cells


@dataclass
class StableVerdict:
    outcome: str
    n: int = -1
    cycle: Optional[Tuple[int, int]] = None  # (first index, period)

    @property
    def related(self):
        return self.outcome == RELATED


@dataclass
class RayVerdict:
    status: str  # in / out / undetermined
    certified: bool = True
    witness: Optional[str] = None


@dataclass
class Sector:
    arc: Optional[DirectionArc]  # None means all directions
    boundary: Tuple = ()  # ((Direction, flag), ...) flag: "mismatch-ray" | "undetermined"
    partial_boundary: Tuple = ()  # certified recurring-mismatch directions

    @property
    def all_directions(self):
        return self.arc is None


@dataclass
class BranchPair:
    a: PeriodicTiling
    b: PeriodicTiling
    k: int
    kind: str
    sectors: List[Sector]
    non_collapsing: str  # "yes" | "no" | "undetermined"
    flags: Tuple = ()

    def members(self):
        return (self.a, self.b)


def _b0_of_patch(system: SubstitutionSystem, tiles) -> Patch:
    origin = Vec2(system.field.zero(), system.field.zero())
    return Patch(tiles_at_point(system, tiles, origin))


class PairAnalyzer:
    """Shared exact caches for one unordered pair of periodic tilings."""

    def __init__(self, a: PeriodicTiling, b: PeriodicTiling,
                 caps: Optional[Caps] = None):
        self.a = a
        self.b = b
        self.system = a.system
        self.k = math.lcm(a.min_period, b.min_period)
        self.caps = caps or Caps()
        self._pointed_memo: Dict[tuple, StableVerdict] = {}
        self._cell_done: Dict[tuple, str] = {}
        self._classes: Dict[tuple, dict] = {}
        self._budget_base = 0
        self.budget_hit = False

    # -- pointed orbits ------------------------------------------------------

    @staticmethod
    def _key_bits(key) -> int:
        worst = 0
        for tk in key:
            for part in tk[1]:
                for i in part:
                    b = i.bit_length() if i >= 0 else (-i).bit_length()
                    if b > worst:
                        worst = b
        return worst

    def _pointed_walk(self, pa: Patch, pb: Patch,
                      max_steps: Optional[int] = None) -> StableVerdict:
        memo = self._pointed_memo
        cap = self.caps.n_max if max_steps is None else max_steps
        path: List[tuple] = []
        seen_at: Dict[tuple, int] = {}
        cur = (pa, pb)
        n = 0
        while True:
            key = (cur[0].key(), cur[1].key())
            got = memo.get(key)
            if got is not None:
                out = StableVerdict(got.outcome,
                                    got.n + n if got.n >= 0 else -1, got.cycle)
                self._memo_path(path, out)
                return out
            if cur[0] == cur[1]:
                out = StableVerdict(RELATED, n)
                self._memo_path(path, out)
                memo[key] = StableVerdict(RELATED, 0)
                return out
            if key in seen_at:
                out = StableVerdict(UNRELATED, cycle=(seen_at[key], n - seen_at[key]))
                for k2 in seen_at:
                    memo[k2] = StableVerdict(UNRELATED, cycle=out.cycle)
                return out
            if n >= cap:
                return StableVerdict(UNDETERMINED, n)
            if n % 8 == 7 and (self._key_bits(key[0]) > self.caps.coord_bits
                               or self._key_bits(key[1]) > self.caps.coord_bits):
                # exploding coordinates: exact recurrence is out of reach
                return StableVerdict(UNDETERMINED, n)
            seen_at[key] = n
            path.append(key)
            cur = (
                _b0_of_patch(self.system,
                             self.system.substitute_list(cur[0].tiles, 1)),
                _b0_of_patch(self.system,
                             self.system.substitute_list(cur[1].tiles, 1)),
            )
            n += 1

    def _memo_path(self, path: List[tuple], terminal: StableVerdict):
        if terminal.outcome == UNDETERMINED:
            return
        m = len(path)
        for i, key in enumerate(path):
            if terminal.outcome == RELATED and terminal.n >= 0:
                self._pointed_memo[key] = StableVerdict(RELATED, terminal.n - i)
            else:
                self._pointed_memo[key] = StableVerdict(
                    terminal.outcome, cycle=terminal.cycle
                )

    def stable_related(self, x: Vec2) -> StableVerdict:
        pa = self.a.handle.point_config(x)
        pb = self.b.handle.point_config(x)
        return self._pointed_walk(pa, pb)

    def point_verdict_from_patches(self, pa: Patch, pb: Patch) -> StableVerdict:
        return self._pointed_walk(pa, pb)

    # -- ray cells -----------------------------------------------------------

    def _segment_tiles(self, patch: Patch, v: Vec2, t_lo, t_hi):
        """Tiles of the patch whose chord on {t v} meets [t_lo, t_hi]."""
        out = []
        fx0 = min(float(t_lo) * float(v.x), float(t_hi) * float(v.x))
        fx1 = max(float(t_lo) * float(v.x), float(t_hi) * float(v.x))
        fy0 = min(float(t_lo) * float(v.y), float(t_hi) * float(v.y))
        fy1 = max(float(t_lo) * float(v.y), float(t_hi) * float(v.y))
        origin = Vec2(self.system.field.zero(), self.system.field.zero())
        for t in patch:
            sup = self.system.support(t)
            bx0, by0, bx1, by1 = sup.float_bbox()
            if (bx1 < fx0 - 1e-9 or bx0 > fx1 + 1e-9
                    or by1 < fy0 - 1e-9 or by0 > fy1 + 1e-9):
                continue
            clip = segment_clip(sup, origin, v)
            if clip.kind == "empty":
                continue
            if clip.t1 < t_lo or clip.t0 > t_hi:
                continue
            out.append((t, clip))
        return out

    def _cells_and_points(self, tiles_a, tiles_b, t_lo, t_hi):
        """Common refinement of both crossing structures on [t_lo, t_hi]."""
        events = {t_lo.key(): t_lo, t_hi.key(): t_hi}
        for _, clip in tiles_a + tiles_b:
            for tv in (clip.t0, clip.t1):
                if t_lo < tv < t_hi:
                    events[tv.key()] = tv
        params = sorted(events.values(), key=float)
        # floats may tie; insertion pass restores the exact order
        for i in range(1, len(params)):
            j = i
            while j > 0 and params[j] < params[j - 1]:
                params[j], params[j - 1] = params[j - 1], params[j]
                j -= 1
        cells = []
        for i in range(len(params) - 1):
            lo, hi = params[i], params[i + 1]
            in_a = [t for t, c in tiles_a
                    if c.kind == "interval" and c.t0 <= lo and c.t1 >= hi]
            in_b = [t for t, c in tiles_b
                    if c.kind == "interval" and c.t0 <= lo and c.t1 >= hi]
            cells.append((Patch(in_a), Patch(in_b), lo, hi))
        points = params[1:-1]
        return cells, points

    def _point_patches_in_cells(self, tiles_a, tiles_b, p_param, v: Vec2):
        p = v.scale(p_param)
        pa = []
        for t, clip in tiles_a:
            if clip.t0 <= p_param <= clip.t1:
                if self.system.support(t).contains(p):
                    pa.append(t.translate(-p))
        pb = []
        for t, clip in tiles_b:
            if clip.t0 <= p_param <= clip.t1:
                if self.system.support(t).contains(p):
                    pb.append(t.translate(-p))
        return Patch(pa), Patch(pb)

    # -- the finite graph of cell classes ------------------------------------
    #
    # A cell class is a pair of tile sets around an open chord sub-segment,
    # normalized so the segment starts at the origin.  Refining a class by
    # the k-fold substitution yields finitely many child classes, all in the
    # same normalized frame, so the class graph of a Pisot system is finite.
    # A class has a forever-mismatched point iff it reaches a cycle of
    # unequal classes or a cut point with an unrelated pointed orbit.

    def _class_of(self, ca: Patch, cb: Patch, v: Vec2, lo, hi):
        anchor = v.scale(lo)
        na = ca.translate(-anchor)
        nb = cb.translate(-anchor)
        length = hi - lo
        return (na.key(), nb.key(), length.key()), (na, nb, length)

    def _expand_class(self, key, rep, v: Vec2, depth: int = 0):
        got = self._classes.get(key)
        if got is not None:
            return got
        na, nb, length = rep
        rec = {"equal": na == nb, "children": [], "points": [], "capped": False}
        self._classes[key] = rec
        if rec["equal"]:
            return rec
        if (depth > self.caps.cell_depth
                or len(self._classes) - self._budget_base > self.caps.cell_budget):
            self.budget_hit = True
            rec["capped"] = True
            return rec
        f = self.system.field
        zero = f.zero()
        lam_k = self.system.lam_pow(self.k)
        s_hi = length * lam_k
        img_a = self.system.substitute_list(na.tiles, self.k)
        img_b = self.system.substitute_list(nb.tiles, self.k)
        tiles_a = self._segment_tiles(img_a, v, zero, s_hi)
        tiles_b = self._segment_tiles(img_b, v, zero, s_hi)
        cells, points = self._cells_and_points(tiles_a, tiles_b, zero, s_hi)
        for ca2, cb2, l2, h2 in cells:
            ckey, crep = self._class_of(ca2, cb2, v, l2, h2)
            rec["children"].append((ckey, crep))
        # cut point verdicts are evaluated lazily: only classes whose cells
        # all resolve need them, and mismatch certificates come cheaper from
        # class cycles
        for p_param in points:
            rec["points"].append(
                self._point_patches_in_cells(tiles_a, tiles_b, p_param, v)
            )
        return rec

    def _class_point_outcomes(self, rec):
        got = rec.get("pverdicts")
        if got is None:
            got = [
                self._pointed_walk(pa, pb, self.caps.point_n_max).outcome
                for pa, pb in rec["points"]
            ]
            rec["pverdicts"] = got
        return got

    def _class_verdict(self, key0, rep0, v: Vec2) -> str:
        """RELATED (all points resolve), UNRELATED (certified mismatch point),
        or UNDETERMINED, by cycle reachability over the class graph.

        Iterative depth-first walk: hitting a class already on the walk stack
        exhibits a cycle of mismatched classes, whose nested sub-segments
        trap a point that never resolves.
        """
        memo = self._cell_done
        got = memo.get(key0)
        if got is not None:
            return got
        onstack = set()
        # frame: [key, children, child index, verdict so far, depth]
        frames: List[list] = []
        fresh = [0]
        repeats = [0]

        def open_frame(key, rep, depth):
            got = memo.get(key)
            if got is not None:
                repeats[0] += 1
                return got
            if key in onstack:
                repeats[0] += 1
                return "cycle"
            if key in self._classes:
                repeats[0] += 1
            else:
                fresh[0] += 1
                if fresh[0] > 120 and repeats[0] == 0:
                    # the class graph shows no sign of closing up: certify
                    # nothing and stop burning the budget
                    self.budget_hit = True
                    return UNDETERMINED
            rec = self._expand_class(key, rep, v, depth)
            if rec["equal"]:
                repeats[0] += 1  # resolving structure counts as progress
                memo[key] = RELATED
                return RELATED
            if rec["capped"]:
                memo[key] = UNDETERMINED
                return UNDETERMINED
            onstack.add(key)
            frames.append([key, rec["children"], 0, RELATED, depth, rec])
            return None

        def finalize(fr):
            key, children, idx, verdict, depth, rec = fr
            if verdict == RELATED:
                # cells resolved; the cut points between them decide
                outcomes = self._class_point_outcomes(rec)
                if any(p == UNRELATED for p in outcomes):
                    verdict = UNRELATED
                elif any(p == UNDETERMINED for p in outcomes):
                    verdict = UNDETERMINED
            onstack.discard(key)
            memo[key] = verdict
            frames.pop()
            if frames:
                parent = frames[-1]
                if verdict == UNRELATED:
                    parent[3] = UNRELATED
                elif verdict == UNDETERMINED and parent[3] == RELATED:
                    parent[3] = UNDETERMINED

        first = open_frame(key0, rep0, 0)
        if first is not None:
            return first if first != "cycle" else UNRELATED
        while frames:
            fr = frames[-1]
            key, children, idx, verdict, depth, rec = fr
            if verdict == UNRELATED or idx >= len(children):
                finalize(fr)
                continue
            fr[2] += 1
            ckey, crep = children[idx]
            sub = open_frame(ckey, crep, depth + 1)
            if sub is None:
                continue
            if sub == "cycle" or sub == UNRELATED:
                fr[3] = UNRELATED
            elif sub == UNDETERMINED and fr[3] == RELATED:
                fr[3] = UNDETERMINED
        return memo[key0]

    def _fundamental_interval(self, v: Direction):
        f = self.system.field
        par = abs(v.vec.x)
        if (abs(v.vec.y) - par).sign() > 0:
            par = abs(v.vec.y)
        a = f.scalar(self.caps.base_scale) / par
        return a, a * self.system.lam_pow(self.k)

    def _interval_statuses(self, v: Direction):
        """Cell and point verdicts on the fundamental interval of the ray."""
        t_lo, t_hi = self._fundamental_interval(v)
        vv = v.vec
        r2 = (t_hi * t_hi) * vv.norm2()
        margin = self.system.field.scalar(self.system.diameter_upper_bound())
        need = r2 + margin * margin + 1
        patch_a = self.a.handle.expand_covering_r2(need)
        patch_b = self.b.handle.expand_covering_r2(need)
        tiles_a = self._segment_tiles(patch_a, vv, t_lo, t_hi)
        tiles_b = self._segment_tiles(patch_b, vv, t_lo, t_hi)
        cells, points = self._cells_and_points(tiles_a, tiles_b, t_lo, t_hi)
        cell_verdicts = []
        for ca, cb, lo, hi in cells:
            key, rep = self._class_of(ca, cb, vv, lo, hi)
            cell_verdicts.append(self._class_verdict(key, rep, vv))
        point_verdicts = []
        for p_param in list(points) + [t_lo]:
            pa, pb = self._point_patches_in_cells(tiles_a, tiles_b, p_param, vv)
            if len(pa) == 0 or len(pb) == 0:
                pa = self.a.handle.point_config(vv.scale(p_param))
                pb = self.b.handle.point_config(vv.scale(p_param))
            point_verdicts.append(self.point_verdict_from_patches(pa, pb).outcome)
        return cell_verdicts, point_verdicts

    def _probe_points(self, v: Direction):
        """Cheap certified-mismatch probes at rational multiples of v.

        Pointed orbits at points with rational parameters have exactly
        recurring states, so an unrelated verdict comes with a cycle
        certificate long before any cell analysis is needed.
        """
        t_lo, t_hi = self._fundamental_interval(v)
        m = self.caps.probe_points
        for j in range(m):
            t = t_lo * (1 + Fraction(j, m)) if j else t_lo
            verdict = self.stable_related(v.vec.scale(t))
            if verdict.outcome == UNRELATED:
                return True
        return False

    def ray_status(self, v: Direction) -> RayVerdict:
        """Whether the whole open ray in direction v is stably related."""
        if self._probe_points(v):
            return RayVerdict(OUT_SECTOR, certified=True)
        self._budget_base = len(self._classes)
        cell_vs, point_vs = self._interval_statuses(v)
        everything = cell_vs + point_vs
        if any(s == UNRELATED for s in everything):
            return RayVerdict(OUT_SECTOR, certified=True)
        if all(s == RELATED for s in everything):
            return RayVerdict(IN_SECTOR, certified=True)
        return RayVerdict(UNDETERMINED, certified=False)

    def _all_mismatch_closure(self, start_cells, v: Vec2) -> str:
        """Closure check that every point of the given cells stays mismatched.

        Explores every reachable cell class once; an equal class or a related
        cut point anywhere in the closure is a witness against, and a
        completed closure of mismatched classes with unrelated cut points
        certifies mismatch at every point.
        """
        seen = set()
        queue = []
        for ca, cb, lo, hi in start_cells:
            key, rep = self._class_of(ca, cb, v, lo, hi)
            if key not in seen:
                seen.add(key)
                queue.append((key, rep, 0))
        undecided = False
        while queue:
            key, rep, depth = queue.pop()
            rec = self._expand_class(key, rep, v, depth)
            if rec["equal"]:
                return "no"
            if rec["capped"]:
                return UNDETERMINED
            outcomes = self._class_point_outcomes(rec)
            if any(p == RELATED for p in outcomes):
                return "no"
            if any(p == UNDETERMINED for p in outcomes):
                undecided = True
            for ckey, crep in rec["children"]:
                if ckey not in seen:
                    seen.add(ckey)
                    queue.append((ckey, crep, depth + 1))
        return UNDETERMINED if undecided else "yes"

    def ray_all_mismatch(self, v: Direction) -> str:
        """Whether every point of the ray is certifiably unrelated."""
        self._budget_base = len(self._classes)
        t_lo, t_hi = self._fundamental_interval(v)
        vv = v.vec
        r2 = (t_hi * t_hi) * vv.norm2()
        margin = self.system.field.scalar(self.system.diameter_upper_bound())
        patch_a = self.a.handle.expand_covering_r2(r2 + margin * margin + 1)
        patch_b = self.b.handle.expand_covering_r2(r2 + margin * margin + 1)
        tiles_a = self._segment_tiles(patch_a, vv, t_lo, t_hi)
        tiles_b = self._segment_tiles(patch_b, vv, t_lo, t_hi)
        cells, points = self._cells_and_points(tiles_a, tiles_b, t_lo, t_hi)
        undecided = False
        for p_param in list(points) + [t_lo]:
            pa, pb = self._point_patches_in_cells(tiles_a, tiles_b, p_param, vv)
            pv = self.point_verdict_from_patches(pa, pb)
            if pv.outcome == RELATED:
                return "no"
            if pv.outcome == UNDETERMINED:
                undecided = True
        closure = self._all_mismatch_closure(cells, vv)
        if closure == "no":
            return "no"
        if closure == UNDETERMINED or undecided:
            return UNDETERMINED
        return "yes"

    # -- candidate directions and sector assembly ----------------------------

    def mismatch_tiles(self, radius) -> List[Tile]:
        ball_a = self.a.handle.ball(radius)
        ball_b = self.b.handle.ball(radius)
        out = list(ball_a.difference(ball_b)) + list(ball_b.difference(ball_a))
        return out

    def candidate_directions(self) -> List[Direction]:
        f = self.system.field
        one = f.one()
        z = f.zero()
        cands = []
        for x, y in ((1, 0), (1, 1), (0, 1), (-1, 1),
                     (-1, 0), (-1, -1), (0, -1), (1, -1)):
            cands.append(Direction(Vec2(one * x if x else z, one * y if y else z)))
        lam_k = self.system.lam_pow(self.k)
        r = f.scalar(2 * self.caps.base_scale)
        for _ in range(self.caps.candidate_levels + 1):
            for t in self.mismatch_tiles(r):
                for vtx in self.system.support(t).vertices:
                    if not vtx.is_zero():
                        d = Direction(vtx)
                        cands.append(d)
                        cands.append(d.antipode())
            r = r * lam_k
        return sort_directions(cands)

    def analyze(self) -> BranchPair:
        origin = self.stable_related(Vec2(self.system.field.zero(),
                                          self.system.field.zero()))
        flags = []
        if origin.outcome == RELATED:
            return BranchPair(self.a, self.b, self.k, NOT_BRANCH, [], "yes",
                              ("stably-related-at-origin",))
        if origin.outcome == UNDETERMINED:
            return BranchPair(self.a, self.b, self.k, NOT_BRANCH, [],
                              UNDETERMINED, ("origin-undetermined",))
        # quick reject: if the eight compass rays are all certified out, no
        # open half circle of related directions can exist
        f = self.system.field
        one, z = f.one(), f.zero()
        compass = [Direction(Vec2(one * x if x else z, one * y if y else z))
                   for x, y in ((1, 0), (1, 1), (0, 1), (-1, 1),
                                (-1, 0), (-1, -1), (0, -1), (1, -1))]
        compass_status = {d: self.ray_status(d) for d in compass}
        stats = [compass_status[d].status for d in compass]
        # longest circular run of compass rays without a certified mismatch;
        # a sector holding an open half circle needs a gap of at least three
        doubled = stats + stats
        run = best = 0
        for s in doubled:
            run = 0 if s == OUT_SECTOR else run + 1
            best = max(best, run)
        if best >= 2 * len(stats):
            best = len(stats)
        if OUT_SECTOR in stats and best <= 2:
            flags = ("mismatch-rays-deny-half-circle",)
            if UNDETERMINED in stats:
                flags += ("not-stabilized",)
            return BranchPair(self.a, self.b, self.k, NOT_BRANCH, [], "yes",
                              flags)
        if IN_SECTOR not in stats:
            # a sector containing an open half circle would contain at least
            # three related compass rays; none could be certified
            return BranchPair(self.a, self.b, self.k, NOT_BRANCH, [],
                              UNDETERMINED, ("not-stabilized",))
        cands = self.candidate_directions()
        statuses = {}
        for d in cands:
            statuses[d] = compass_status[d].status if d in compass_status \
                else self.ray_status(d).status
        n = len(cands)
        arc_status = []
        for i in range(n):
            mid = Direction(cands[i].vec + cands[(i + 1) % n].vec)
            arc_status.append(self.ray_status(mid).status)
        if all(statuses[d] == IN_SECTOR for d in cands) and all(
                s == IN_SECTOR for s in arc_status):
            sector = Sector(None)
            return BranchPair(self.a, self.b, self.k, ISOLATED, [sector],
                              "yes", tuple(flags))
        if any(s == UNDETERMINED for s in statuses.values()) or any(
                s == UNDETERMINED for s in arc_status):
            flags.append("not-stabilized")
        sectors = self._assemble_sectors(cands, statuses, arc_status, flags)
        kind = self._classify(sectors)
        if kind == NOT_BRANCH:
            return BranchPair(self.a, self.b, self.k, NOT_BRANCH, sectors,
                              "yes", tuple(flags))
        nc = self._non_collapsing(sectors)
        return BranchPair(self.a, self.b, self.k, kind, sectors, nc,
                          tuple(flags))

    def _assemble_sectors(self, cands, statuses, arc_status, flags):
        n = len(cands)
        items = []
        for i in range(n):
            items.append(("pt", i, statuses[cands[i]]))
            items.append(("arc", i, arc_status[i]))
        if not any(it[2] != IN_SECTOR for it in items):
            return [Sector(None)]
        start = next(i for i, it in enumerate(items) if it[2] != IN_SECTOR)
        items = items[start:] + items[:start]
        sectors = []
        run: List[int] = []

        def close_run():
            if not run:
                return
            lo_idx, hi_idx = run[0], run[-1]
            start_dir = cands[(lo_idx - 1) % n]
            end_dir = cands[(hi_idx + 1) % n]
            # the claimed open arc includes the two flank arcs between the
            # boundary direction and the first/last related candidate; those
            # samples must themselves be related or the boundary is unresolved
            flanks_ok = (arc_status[(lo_idx - 1) % n] == IN_SECTOR
                         and arc_status[hi_idx] == IN_SECTOR)
            if not flanks_ok and "boundary-inside-arc" not in flags:
                flags.append("boundary-inside-arc")
            bflags = []
            pb = []
            for d in (start_dir, end_dir):
                st = statuses.get(d)
                if st == OUT_SECTOR and flanks_ok:
                    bflags.append((d, "mismatch-ray"))
                    pb.append(d)
                else:
                    bflags.append((d, "undetermined"))
            sectors.append(Sector(DirectionArc(start_dir, end_dir),
                                  tuple(bflags), tuple(pb)))

        for kind, i, st in items:
            if kind == "pt":
                if st == IN_SECTOR:
                    run.append(i)
                else:
                    close_run()
                    run = []
            else:
                if st != IN_SECTOR:
                    close_run()
                    run = []
        close_run()
        return sectors

    def _classify(self, sectors) -> str:
        if len(sectors) == 1 and sectors[0].all_directions:
            return ISOLATED
        best = NOT_BRANCH
        for s in sectors:
            if s.all_directions:
                return ISOLATED
            v1, v2 = s.arc.start, s.arc.end
            anti = v1.antipode()
            if anti == v2:
                if best == NOT_BRANCH:
                    best = LINE
            elif ccw_between(v1, anti, v2):
                best = CORNER
        return best

    def _non_collapsing(self, sectors) -> str:
        verdicts = []
        for s in sectors:
            if s.all_directions:
                continue
            for d, flag in s.boundary:
                if flag != "mismatch-ray":
                    verdicts.append(UNDETERMINED)
                    continue
                verdicts.append(self.ray_all_mismatch(d))
        if any(v == "no" for v in verdicts):
            return "no"
        if any(v == UNDETERMINED for v in verdicts):
            return UNDETERMINED
        return "yes"


def stable_related(a: PeriodicTiling, b: PeriodicTiling, x: Vec2,
                   n_max: int = 64) -> StableVerdict:
    an = PairAnalyzer(a, b, Caps(n_max=n_max))
    return an.stable_related(x)


def sectors(a: PeriodicTiling, b: PeriodicTiling,
            caps: Optional[Caps] = None) -> BranchPair:
    return PairAnalyzer(a, b, caps).analyze()


def _symmetry_tiling_action(tilings: List[PeriodicTiling]):
    """The permutation the declared symmetry induces on the enumerated set,
    or None when no symmetry is declared or the set is not invariant."""
    if not tilings:
        return None
    system = tilings[0].system
    if system.symmetry is None:
        return None
    matrix, perm = system.symmetry
    (a, b), (c, d) = matrix
    by_key = {p.key(): p.index for p in tilings}
    action = {}
    for p in tilings:
        rot = Patch([
            Tile(perm[t.proto], Vec2(t.shift.x * a + t.shift.y * b,
                                     t.shift.x * c + t.shift.y * d))
            for t in p.seed
        ])
        got = by_key.get(rot.key())
        if got is None:
            return None
        action[p.index] = got
    return action


def _rotate_direction(system: SubstitutionSystem, d: Direction, times: int):
    matrix, _ = system.symmetry
    (a, b), (c, d2) = matrix
    v = d.vec
    for _ in range(times):
        v = Vec2(v.x * a + v.y * b, v.x * c + v.y * d2)
    return Direction(v)


def _transport_pair(bp: BranchPair, a: PeriodicTiling, b: PeriodicTiling,
                    times: int) -> BranchPair:
    system = a.system
    sectors_out = []
    for s in bp.sectors:
        if s.all_directions:
            sectors_out.append(Sector(None))
            continue
        arc = DirectionArc(_rotate_direction(system, s.arc.start, times),
                           _rotate_direction(system, s.arc.end, times))
        boundary = tuple((_rotate_direction(system, d, times), flag)
                         for d, flag in s.boundary)
        pb = tuple(_rotate_direction(system, d, times)
                   for d in s.partial_boundary)
        sectors_out.append(Sector(arc, boundary, pb))
    return BranchPair(a, b, bp.k, bp.kind, sectors_out, bp.non_collapsing,
                      bp.flags + ("symmetry-transported",))


def branch_pairs(tilings: List[PeriodicTiling],
                 caps: Optional[Caps] = None,
                 keep_all: bool = False,
                 use_symmetry: bool = True) -> List[BranchPair]:
    """Analyze all unordered pairs; keep the certified branch pairs.

    When the system declares a rotational symmetry and the enumerated set is
    invariant under it, one representative per pair orbit is analyzed and the
    rest are transported by rotating all reported directions.  With keep_all,
    non-branch pairs are kept too.
    """
    action = _symmetry_tiling_action(tilings) if use_symmetry else None
    by_index = {p.index: p for p in tilings}
    all_pairs = [(tilings[i].index, tilings[j].index)
                 for i in range(len(tilings))
                 for j in range(i + 1, len(tilings))]
    out = []
    if action is None:
        for i, j in all_pairs:
            bp = PairAnalyzer(by_index[i], by_index[j], caps).analyze()
            if keep_all or bp.kind != NOT_BRANCH:
                out.append(bp)
    else:
        orbits: Dict[tuple, list] = {}
        for i, j in all_pairs:
            orbit = []
            x, y = i, j
            while True:
                orbit.append(tuple(sorted((x, y))))
                x, y = action[x], action[y]
                if tuple(sorted((x, y))) == orbit[0]:
                    break
            rep = min(orbit)
            orbits.setdefault(rep, orbit)
        analyzed: Dict[tuple, BranchPair] = {}
        for rep, orbit in sorted(orbits.items()):
            bp = PairAnalyzer(by_index[rep[0]], by_index[rep[1]], caps).analyze()
            analyzed[rep] = bp
            seen = {rep}
            x, y = rep
            times = 0
            while True:
                x, y = action[x], action[y]
                times += 1
                key = tuple(sorted((x, y)))
                if key in seen:
                    break
                seen.add(key)
                analyzed[key] = _transport_pair(bp, by_index[key[0]],
                                                by_index[key[1]], times)
        for i, j in all_pairs:
            bp = analyzed[(i, j)]
            if keep_all or bp.kind != NOT_BRANCH:
                out.append(bp)
    out.sort(key=lambda bp: (bp.a.index, bp.b.index))
    return out


def agreement_region(a: PeriodicTiling, b: PeriodicTiling, radius,
                     depth: int = 4):
    """Increasing agreement and decreasing mismatch approximants.

    Level j holds the tiles common to (resp. differing between) the two
    tilings within radius lambda^{jk} * radius, scaled back by lambda^{-jk};
    every polygon list is exact.
    """
    system = a.system
    k = math.lcm(a.min_period, b.min_period)
    f = system.field
    r = radius if isinstance(radius, FieldScalar) else f.scalar(radius)
    agree_levels = []
    mismatch_levels = []
    for j in range(depth + 1):
        rj = r * system.lam_pow(j * k)
        ball_a = a.handle.ball(rj)
        ball_b = b.handle.ball(rj)
        shrink = f.one() / system.lam_pow(j * k)
        common = [system.support(t).scale(shrink)
                  for t in ball_a if t in ball_b]
        diff = [system.support(t).scale(shrink)
                for t in list(ball_a.difference(ball_b))
                + list(ball_b.difference(ball_a))]
        agree_levels.append(common)
        mismatch_levels.append(diff)
    return agree_levels, mismatch_levels
