from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tessera.field import (
    DivisionByZero,
    NotAlgebraicInteger,
    NotExpanding,
    NotIrreducible,
    field_make,
    is_pisot,
    scalar_from_json,
)


SQRT2 = field_make(2, (0, 2))
SILVER = field_make(2, (2, 1))  # omega = 1 + sqrt(2)
SQRT3 = field_make(2, (0, 3))
Q = field_make(1, (2, 0))


def test_field_make_examples():
    assert SILVER.degree == 2
    assert abs(SILVER.omega_float() - (1 + 2 ** 0.5)) < 1e-12
    assert Q.degree == 1
    assert Q.omega().as_fraction() == 2
    with pytest.raises(NotIrreducible):
        field_make(2, (2, -1))  # x^2-2x+1 = (x-1)^2
    with pytest.raises(NotIrreducible):
        field_make(2, (3, 4))  # root 4 is rational
    with pytest.raises(Exception):
        field_make(2, (0, -1))  # complex roots


def test_arithmetic_examples():
    w = SQRT2.omega()
    x = SQRT2.scalar(1) + w
    assert (x * x).key() == SQRT2.scalar(3, 2).key()
    assert (x + 0).key() == x.key()
    q = SQRT2.scalar(3, 2) / x
    assert q.key() == x.key()
    assert (q * x).key() == SQRT2.scalar(3, 2).key()
    with pytest.raises(DivisionByZero):
        x / SQRT2.zero()


def test_sign_examples():
    w = SQRT2.omega()
    assert (SQRT2.scalar(3) - 2 * w).sign() == 1  # 9 > 8
    assert SQRT2.zero().sign() == 0
    lam = SILVER.omega()  # 1 + sqrt(2)
    assert (SILVER.one() - lam).sign() == -1
    assert (-w).sign() == -1
    assert w.sign() == 1


def test_order_operators():
    w = SQRT3.omega()
    assert SQRT3.scalar(Fraction(12, 7)) < w < SQRT3.scalar(Fraction(26, 15))
    assert abs(SQRT3.scalar(-2)).as_fraction() == 2


def test_is_pisot_examples():
    assert is_pisot(SILVER, SILVER.omega())  # 1 + sqrt(2)
    assert is_pisot(Q, Q.scalar(2))
    assert not is_pisot(SQRT2, SQRT2.omega())  # conjugate -sqrt(2)
    assert is_pisot(SQRT3, SQRT3.scalar(2))  # rational integer in Q(sqrt3)
    with pytest.raises(NotExpanding):
        is_pisot(SQRT2, SQRT2.scalar(1))
    with pytest.raises(NotAlgebraicInteger):
        is_pisot(SQRT2, SQRT2.scalar(Fraction(3, 2)))


def test_json_round_trip():
    x = SQRT2.scalar(Fraction(1, 2), Fraction(-3, 4))
    j = x.to_json()
    assert j == {"num": [2, -3], "den": 4}
    y = scalar_from_json(SQRT2, j)
    assert y.key() == x.key()
    assert scalar_from_json(SQRT2, 5).key() == SQRT2.scalar(5).key()
    assert scalar_from_json(SQRT2, "1/3").key() == SQRT2.scalar(Fraction(1, 3)).key()


rationals = st.fractions(
    min_value=-1000, max_value=1000, max_denominator=10**4
)


@given(rationals, rationals, rationals, rationals)
def test_exactness_properties(a1, b1, a2, b2):
    x = SILVER.scalar(a1, b1)
    y = SILVER.scalar(a2, b2)
    assert (x + (-x)).is_zero()
    if not y.is_zero():
        assert ((x * y) / y).key() == x.key()


@given(rationals, rationals)
def test_sign_matches_float(a, b):
    x = SQRT2.scalar(a, b)
    approx = float(a) + float(b) * 2 ** 0.5
    if abs(approx) > 1e-7:
        assert x.sign() == (1 if approx > 0 else -1)
