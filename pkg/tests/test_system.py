import copy
import random
from fractions import Fraction

import pytest

from tessera.field import field_make
from tessera.geometry import vec
from tessera.system import (
    CoverageGap,
    NotPrimitive,
    Overlap,
    Patch,
    RuleTileOutside,
    Tile,
    load_bundled,
    system_load,
    system_to_json,
)


@pytest.fixture(scope="module")
def chair():
    return load_bundled("chair")


@pytest.fixture(scope="module")
def halfhex():
    return load_bundled("halfhex")


def test_chair_loads_with_expected_shape(chair):
    assert len(chair.prototiles) == 4
    assert chair.lam.as_fraction() == 2
    m = chair.matrix()
    assert [m[j][0] for j in range(4)] == [2, 1, 0, 1]
    assert chair.pisot()


def test_halfhex_loads(halfhex):
    assert len(halfhex.prototiles) == 6
    assert all(len(r) == 4 for r in halfhex.rules)
    assert halfhex.pisot()


def test_coverage_gap_reported(chair):
    doc = copy.deepcopy(system_to_json(chair))
    del doc["rules"]["ne"][0]
    with pytest.raises(CoverageGap) as err:
        system_load(doc)
    assert "missing" in str(err.value) and "1" in str(err.value)


def test_overlap_reported(chair):
    doc = copy.deepcopy(system_to_json(chair))
    doc["rules"]["ne"][0] = dict(doc["rules"]["ne"][3])
    doc["rules"]["ne"][0]["proto"] = "nw"
    with pytest.raises(Overlap):
        system_load(doc)


def test_rule_tile_outside(chair):
    doc = copy.deepcopy(system_to_json(chair))
    doc["rules"]["ne"][3]["shift"] = [{"num": [5, 0], "den": 2}, {"num": [1, 0], "den": 2}]
    with pytest.raises(RuleTileOutside):
        system_load(doc)


def test_not_primitive():
    # two independent 1x1 squares that only ever substitute to themselves
    doc = {
        "field": {"degree": 1, "minpoly": [2, 0]},
        "lambda": 2,
        "prototiles": [
            {"name": "a", "mark": "a",
             "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
            {"name": "b", "mark": "b",
             "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
        ],
        "rules": {
            "a": [{"proto": "a", "shift": [0, 0]}, {"proto": "a", "shift": [1, 0]},
                  {"proto": "a", "shift": [0, 1]}, {"proto": "a", "shift": [1, 1]}],
            "b": [{"proto": "b", "shift": [0, 0]}, {"proto": "b", "shift": [1, 0]},
                  {"proto": "b", "shift": [0, 1]}, {"proto": "b", "shift": [1, 1]}],
        },
    }
    with pytest.raises(NotPrimitive):
        system_load(doc)


def test_substitute_counts(chair):
    f = chair.field
    empty = Patch([])
    assert len(chair.substitute(empty, 3)) == 0
    one = Patch([Tile(0, vec(f, 0, 0))])
    assert len(chair.substitute(one, 1)) == 4
    for n in range(4):
        assert len(chair.substitute(one, n)) == 4 ** n


def matpow(m, n):
    k = len(m)
    out = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
    for _ in range(n):
        out = [[sum(out[i][x] * m[x][j] for x in range(k)) for j in range(k)]
               for i in range(k)]
    return out


@pytest.mark.parametrize("name", ["chair", "halfhex"])
def test_matrix_consistency(name):
    system = load_bundled(name)
    f = system.field
    m = system.matrix()
    for i in range(len(system.prototiles)):
        seed = Patch([Tile(i, vec(f, 0, 0))])
        for n in range(5):
            mp = matpow(m, n)
            counts = [0] * len(system.prototiles)
            for t in system.substitute(seed, n):
                counts[t.proto] += 1
            assert counts == [mp[j][i] for j in range(len(m))]


def test_area_conservation(chair, halfhex):
    for system in (chair, halfhex):
        lam2 = system.lam * system.lam
        for i, rule in enumerate(system.rules):
            total = system.field.zero()
            for t in rule:
                total = total + system.support(t).area()
            want = lam2 * system.prototiles[i].support.area()
            assert total.key() == want.key()


def test_substitution_equivariance_under_symmetry(chair):
    matrix, perm = chair.symmetry
    (a, b), (c, d) = matrix

    def rot_vec(v):
        return vec(chair.field, 0, 0).__class__(
            v.x * a + v.y * b, v.x * c + v.y * d
        )

    f = chair.field
    for i in range(4):
        img = chair.substitute(Patch([Tile(i, vec(f, 0, 0))]), 1)
        rot_img = Patch([Tile(perm[t.proto], rot_vec(t.shift)) for t in img])
        want = chair.substitute(Patch([Tile(perm[i], vec(f, 0, 0))]), 1)
        assert rot_img == want
