"""Substitution systems: prototiles, tiles, patches, validated rules.

A system is immutable after loading.  Validation enforces the exact cover
conditions tile by tile: rule tiles stay inside the inflated prototile, have
pairwise disjoint interiors, and their areas add up to lambda^2 times the
prototile area.  Together these force the rule to tile the inflation exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Optional, Sequence

from .field import Field, FieldScalar, field_from_json, field_to_json, is_pisot, scalar_from_json
from .geometry import (
    Contact,
    ConvexPolygon,
    Vec2,
    convex_clip,
    polygon_make,
    vec_from_json,
    vec_to_json,
)


class SystemError(ValueError):
    pass


class CoverageGap(SystemError):
    pass


class Overlap(SystemError):
    pass


class RuleTileOutside(SystemError):
    pass


class NotPrimitive(SystemError):
    pass


class LambdaNotInField(SystemError):
    pass


@dataclass(frozen=True)
class Prototile:
    id: int
    name: str
    mark: str
    support: ConvexPolygon

    def diameter2(self) -> FieldScalar:
        best = None
        vs = self.support.vertices
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                d2 = (vs[i] - vs[j]).norm2()
                if best is None or d2 > best:
                    best = d2
        return best


@dataclass(frozen=True, slots=True)
class Tile:
    proto: int
    shift: Vec2

    def key(self):
        return (self.proto, self.shift.key())

    def translate(self, v: Vec2) -> "Tile":
        return Tile(self.proto, self.shift + v)


class Patch:
    """Finite set of tiles in canonical order, hashable and immutable."""

    __slots__ = ("tiles", "_keyset", "_key")

    def __init__(self, tiles: Sequence[Tile]):
        seen = {}
        for t in tiles:
            seen[t.key()] = t
        object.__setattr__(self, "tiles", tuple(
            seen[k] for k in sorted(seen)))
        object.__setattr__(self, "_keyset", frozenset(seen))
        object.__setattr__(self, "_key", tuple(sorted(seen)))

    def __setattr__(self, *a):
        raise AttributeError("Patch is immutable")

    def __iter__(self):
        return iter(self.tiles)

    def __len__(self):
        return len(self.tiles)

    def __contains__(self, t: Tile):
        return t.key() in self._keyset

    def __eq__(self, other):
        return isinstance(other, Patch) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def key(self):
        return self._key

    def translate(self, v: Vec2) -> "Patch":
        return Patch([t.translate(v) for t in self.tiles])

    def union(self, other: "Patch") -> "Patch":
        return Patch(list(self.tiles) + list(other.tiles))

    def issubset(self, other: "Patch") -> bool:
        return self._keyset <= other._keyset

    def difference(self, other: "Patch") -> "Patch":
        return Patch([t for t in self.tiles if t.key() not in other._keyset])

    def __repr__(self):
        return f"Patch<{len(self.tiles)} tiles>"


class SubstitutionSystem:
    """Validated substitution with scalar expansion lambda."""

    def __init__(self, name, field, lam, prototiles, rules, symmetry=None,
                 source=None):
        self.name = name
        self.field: Field = field
        self.lam: FieldScalar = lam
        self.prototiles: tuple = tuple(prototiles)
        self.rules: tuple = tuple(rules)  # rules[i] is a Patch
        self.symmetry = symmetry  # optional (matrix, permutation)
        self.source = source  # canonical JSON document, for hashing
        self._support_cache = {}
        self._lam_pows = {0: field.one()}
        self._validate()

    # -- geometry helpers ---------------------------------------------------

    def support(self, tile: Tile) -> ConvexPolygon:
        got = self._support_cache.get(tile.key())
        if got is None:
            got = self.prototiles[tile.proto].support.translate(tile.shift)
            self._support_cache[tile.key()] = got
        return got

    def lam_pow(self, n: int) -> FieldScalar:
        if n not in self._lam_pows:
            if n > 0:
                self._lam_pows[n] = self.lam_pow(n - 1) * self.lam
            else:
                self._lam_pows[n] = self.lam_pow(n + 1) / self.lam
        return self._lam_pows[n]

    def max_diameter2(self) -> FieldScalar:
        best = None
        for p in self.prototiles:
            d2 = p.diameter2()
            if best is None or d2 > best:
                best = d2
        return best

    def diameter_upper_bound(self) -> Fraction:
        """Rational r with r^2 >= max squared prototile diameter."""
        d2 = float(self.max_diameter2())
        r = Fraction(int(d2 ** 0.5 * 1024) + 2, 1024)
        while (self.field.scalar(r * r) - self.max_diameter2()).sign() < 0:
            r *= 2
        return r

    # -- substitution -------------------------------------------------------

    def substitute_tile(self, tile: Tile) -> Patch:
        rule = self.rules[tile.proto]
        shift = tile.shift.scale(self.lam)
        return Patch([t.translate(shift) for t in rule])

    def substitute(self, patch: Patch, n: int = 1) -> Patch:
        """Exact n-fold substitution image of a patch."""
        return Patch(self.substitute_list(patch.tiles, n))

    def substitute_list(self, tiles, n: int = 1) -> list:
        """Substitution image as a plain tile list, skipping canonicalization."""
        if n < 0:
            raise SystemError("negative substitution power")
        cur = list(tiles)
        for _ in range(n):
            nxt = []
            for t in cur:
                rule = self.rules[t.proto]
                shift = t.shift.scale(self.lam)
                nxt.extend(r.translate(shift) for r in rule)
            cur = nxt
        return cur

    def matrix(self):
        """M[j][i] counts prototile j in the rule for prototile i."""
        k = len(self.prototiles)
        m = [[0] * k for _ in range(k)]
        for i, rule in enumerate(self.rules):
            for t in rule:
                m[t.proto][i] += 1
        return m

    def pisot(self) -> bool:
        return is_pisot(self.field, self.lam)

    # -- validation ---------------------------------------------------------

    def _validate(self):
        f = self.field
        if self.lam.field != f:
            raise LambdaNotInField("expansion must live in the system field")
        if not self.lam > 1:
            raise SystemError("expansion must exceed 1")
        seen = set()
        for p in self.prototiles:
            k = (p.support.key(), p.mark)
            if k in seen:
                raise SystemError(
                    f"prototiles {p.name!r} duplicates an earlier (shape, mark) pair"
                )
            seen.add(k)
        lam2 = self.lam * self.lam
        for i, rule in enumerate(self.rules):
            target = self.prototiles[i].support.scale(self.lam)
            total = f.zero()
            supports = []
            for t in rule:
                s = self.support(t)
                supports.append((t, s))
                total = total + s.area()
                clip = convex_clip(s, target)
                if clip.kind != "polygon" or clip.polygon.area().key() != s.area().key():
                    raise RuleTileOutside(
                        f"rule tile {t} of {self.prototiles[i].name!r} "
                        f"leaves the inflated support"
                    )
            want = lam2 * self.prototiles[i].support.area()
            if total.key() != want.key():
                raise CoverageGap(
                    f"rule for {self.prototiles[i].name!r}: tile areas sum to "
                    f"{total!r}, expected {want!r} (missing {want - total!r})"
                )
            for a in range(len(supports)):
                for b in range(a + 1, len(supports)):
                    clip = convex_clip(supports[a][1], supports[b][1])
                    if clip.kind == "polygon":
                        raise Overlap(
                            f"rule tiles {supports[a][0]} and {supports[b][0]} "
                            f"of {self.prototiles[i].name!r} overlap"
                        )
        self._check_primitive()

    def _check_primitive(self):
        k = len(self.prototiles)
        m = self.matrix()
        reach = [[bool(m[r][c]) for c in range(k)] for r in range(k)]
        cur = reach
        for _ in range(k):
            nxt = [[cur[r][c] or any(cur[r][x] and reach[x][c] for x in range(k))
                    for c in range(k)] for r in range(k)]
            if nxt == cur:
                break
            cur = nxt
        if not all(all(row) for row in cur):
            raise NotPrimitive("substitution matrix is not primitive")

    def __repr__(self):
        return (f"SubstitutionSystem({self.name!r}, {len(self.prototiles)} "
                f"prototiles, lambda={self.lam!r})")


def system_from_json(doc, name="system") -> SubstitutionSystem:
    field = field_from_json(doc["field"])
    lam = scalar_from_json(field, doc["lambda"])
    protos = []
    index = {}
    for i, p in enumerate(doc["prototiles"]):
        support = polygon_make(
            [vec_from_json(field, v) for v in p["vertices"]]
        )
        protos.append(Prototile(i, p["name"], p.get("mark", p["name"]), support))
        index[p["name"]] = i
    rules = []
    for p in protos:
        spec = doc["rules"][p.name]
        tiles = [
            Tile(index[r["proto"]], vec_from_json(field, r["shift"]))
            for r in spec
        ]
        rules.append(Patch(tiles))
    symmetry = None
    if "symmetry" in doc:
        s = doc["symmetry"]
        matrix = tuple(
            tuple(scalar_from_json(field, x) for x in row)
            for row in s["matrix"]
        )
        perm = tuple(index[nm] for nm in s["permutation"])
        symmetry = (matrix, perm)
    return SubstitutionSystem(
        name, field, lam, protos, rules, symmetry=symmetry, source=doc
    )


def system_load(path_or_doc, name: Optional[str] = None) -> SubstitutionSystem:
    """Load and fully validate a system definition (path, JSON text, or dict)."""
    if isinstance(path_or_doc, dict):
        return system_from_json(path_or_doc, name or "system")
    text = None
    label = name
    try:
        with open(path_or_doc) as fh:
            text = fh.read()
        label = label or str(path_or_doc)
    except (OSError, TypeError):
        text = path_or_doc
        label = label or "system"
    return system_from_json(json.loads(text), label)


def system_to_json(system: SubstitutionSystem):
    doc = {
        "field": field_to_json(system.field),
        "lambda": system.lam.to_json(),
        "prototiles": [
            {
                "name": p.name,
                "mark": p.mark,
                "vertices": [vec_to_json(v) for v in p.support.vertices],
            }
            for p in system.prototiles
        ],
        "rules": {
            system.prototiles[i].name: [
                {"proto": system.prototiles[t.proto].name,
                 "shift": vec_to_json(t.shift)}
                for t in rule
            ]
            for i, rule in enumerate(system.rules)
        },
    }
    return doc


@lru_cache(maxsize=None)
def bundled_names():
    out = []
    for item in resources.files("tessera.data").iterdir():
        if item.name.endswith(".json"):
            out.append(item.name[:-5])
    return tuple(sorted(out))


def load_bundled(name: str) -> SubstitutionSystem:
    text = resources.files("tessera.data").joinpath(f"{name}.json").read_text()
    return system_load(text, name=name)
