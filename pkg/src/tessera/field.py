"""Exact arithmetic in a real quadratic (or rational) number field.

Every coordinate, length and expansion factor in this package is a
FieldScalar: (p + q*omega)/d with integers p, q and positive d, where omega
is the larger real root of x^2 = t*x + n.  All comparisons are decided by
exact integer case analysis; floating point is used only for rendering and
prefiltering.  Representations are reduced lazily, so bulk geometry stays in
plain integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Union


class FieldError(ValueError):
    pass


class NotIrreducible(FieldError):
    pass


class NonRealRoot(FieldError):
    pass


class NotAlgebraicInteger(FieldError):
    pass


class NotExpanding(FieldError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


def _is_square(k: int) -> bool:
    if k < 0:
        return False
    r = isqrt(k)
    return r * r == k


def _safe_float(num: int, den: int) -> float:
    try:
        return num / den
    except OverflowError:
        shift = max(num.bit_length(), den.bit_length()) - 512
        num2 = num >> shift if num >= 0 else -((-num) >> shift)
        den2 = den >> shift
        if den2 == 0:
            return float("inf") if num2 >= 0 else float("-inf")
        try:
            return num2 / den2
        except OverflowError:
            return float("inf") if num2 >= 0 else float("-inf")


@dataclass(frozen=True, slots=True)
class Field:
    """Number field Q(omega).

    degree 2: omega is the larger real root of x^2 = t*x + n, which must be
    irrational (t^2 + 4n positive and not a perfect square).
    degree 1: the rationals; omega := t is an ordinary integer and scalars
    keep q == 0.
    """

    degree: int
    t: int
    n: int

    def __post_init__(self):
        if self.degree not in (1, 2):
            raise FieldError(f"unsupported degree {self.degree}")
        if self.degree == 2:
            disc = self.t * self.t + 4 * self.n
            if disc < 0:
                raise NonRealRoot(f"x^2 = {self.t}x + {self.n} has no real root")
            if disc == 0 or _is_square(disc):
                raise NotIrreducible(
                    f"x^2 - {self.t}x - {self.n} has a rational root"
                )

    @property
    def disc(self) -> int:
        return self.t * self.t + 4 * self.n

    def scalar(self, a, b=0) -> "FieldScalar":
        a = a if isinstance(a, Fraction) else Fraction(a)
        b = b if isinstance(b, Fraction) else Fraction(b)
        if self.degree == 1 and b != 0:
            # omega is the integer t; fold it in to keep q == 0 canonical
            a, b = a + b * self.t, Fraction(0)
        da, db = a.denominator, b.denominator
        d = da * db // gcd(da, db)
        return FieldScalar(self, a.numerator * (d // da),
                           b.numerator * (d // db), d)

    def zero(self) -> "FieldScalar":
        return FieldScalar(self, 0, 0, 1)

    def one(self) -> "FieldScalar":
        return FieldScalar(self, 1, 0, 1)

    def omega(self) -> "FieldScalar":
        if self.degree == 1:
            return FieldScalar(self, self.t, 0, 1)
        return FieldScalar(self, 0, 1, 1)

    def omega_float(self) -> float:
        if self.degree == 1:
            return float(self.t)
        return (self.t + self.disc ** 0.5) / 2.0

    def __repr__(self):
        if self.degree == 1:
            return "Q"
        return f"Q(omega: x^2={self.t}x+{self.n})"


Rat = Union[int, Fraction]

_REDUCE_BITS = 48


@dataclass(frozen=True, slots=True, eq=False)
class FieldScalar:
    """Exact element (p + q*omega)/d of a Field; d > 0, reduced lazily."""

    field: Field
    p: int
    q: int
    d: int

    def _wrap(self, p: int, q: int, d: int) -> "FieldScalar":
        if d < 0:
            p, q, d = -p, -q, -d
        if d.bit_length() > _REDUCE_BITS:
            g = gcd(gcd(p, q), d)
            if g > 1:
                p, q, d = p // g, q // g, d // g
        return FieldScalar(self.field, p, q, d)

    def _coerce(self, other):
        if isinstance(other, FieldScalar):
            if other.field is not self.field and other.field != self.field:
                raise FieldError("mixed fields")
            return other
        if isinstance(other, int):
            return FieldScalar(self.field, other, 0, 1)
        if isinstance(other, Fraction):
            return FieldScalar(self.field, other.numerator, 0,
                               other.denominator)
        return None

    # -- ring operations (denominators multiply, reduction is lazy) ----------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.d == o.d:
            return self._wrap(self.p + o.p, self.q + o.q, self.d)
        return self._wrap(self.p * o.d + o.p * self.d,
                          self.q * o.d + o.q * self.d, self.d * o.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.d == o.d:
            return self._wrap(self.p - o.p, self.q - o.q, self.d)
        return self._wrap(self.p * o.d - o.p * self.d,
                          self.q * o.d - o.q * self.d, self.d * o.d)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldScalar(self.field, -self.p, -self.q, self.d)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # omega^2 = t*omega + n
        p1, q1, p2, q2 = self.p, self.q, o.p, o.q
        if q1 == 0 and q2 == 0:
            return self._wrap(p1 * p2, 0, self.d * o.d)
        f = self.field
        qq = q1 * q2
        return self._wrap(p1 * p2 + f.n * qq,
                          p1 * q2 + p2 * q1 + f.t * qq, self.d * o.d)

    __rmul__ = __mul__

    def inverse(self) -> "FieldScalar":
        if self.p == 0 and self.q == 0:
            raise DivisionByZero("inverse of zero")
        f = self.field
        if self.q == 0:
            return self._wrap(self.d, 0, self.p)
        # multiply by the conjugate: norm = p^2 + p q t - q^2 n is rational
        norm = self.p * self.p + self.p * self.q * f.t - self.q * self.q * f.n
        if norm == 0:
            raise DivisionByZero("zero norm, field is degenerate")
        return self._wrap(self.d * (self.p + self.q * f.t),
                          -self.d * self.q, norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def conjugate(self) -> "FieldScalar":
        """Galois image omega -> t - omega (identity in degree 1)."""
        if self.field.degree == 1:
            return self
        return FieldScalar(self.field, self.p + self.q * self.field.t,
                           -self.q, self.d)

    # -- exact order ----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def sign(self) -> int:
        """Exact sign under the embedding sending omega to the larger root."""
        f = self.field
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        if f.degree == 1:
            v = p + q * f.t
            return (v > 0) - (v < 0)
        # (p + q*omega) ~ P + Q*sqrt(D) with P = 2p + qt, Q = q, D = disc
        pp = 2 * p + q * f.t
        sp = (pp > 0) - (pp < 0)
        sq = (q > 0) - (q < 0)
        if sp == 0:
            return sq
        if sq == 0 or sp == sq:
            return sp
        lhs = pp * pp
        rhs = q * q * f.disc
        if lhs == rhs:
            return 0
        return sp if lhs > rhs else sq

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, FieldScalar) else other
        if o is None or not isinstance(o, FieldScalar):
            return NotImplemented
        return (self.p * o.d == o.p * self.d
                and self.q * o.d == o.q * self.d)

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return (_safe_float(self.p, self.d)
                + _safe_float(self.q, self.d) * self.field.omega_float())

    def __bool__(self):
        return not self.is_zero()

    # -- canonical access ------------------------------------------------------

    @property
    def a(self) -> Fraction:
        return Fraction(self.p, self.d)

    @property
    def b(self) -> Fraction:
        return Fraction(self.q, self.d)

    def as_fraction(self) -> Fraction:
        if self.q != 0:
            raise FieldError("irrational scalar has no Fraction value")
        return Fraction(self.p, self.d)

    def key(self):
        """Hashable exact identity: the reduced (p, q, d) triple."""
        g = gcd(gcd(self.p, self.q), self.d)
        if g > 1:
            return (self.p // g, self.q // g, self.d // g)
        return (self.p, self.q, self.d)

    def to_json(self):
        """Canonical literal {"num":[a0,a1],"den":d} with gcd(a0,a1,d)=1."""
        p, q, d = self.key()
        return {"num": [p, q], "den": d}

    def __repr__(self):
        a, b = self.a, self.b
        if b == 0:
            return str(a)
        if a == 0:
            return f"{b}w"
        return f"{a}{'+' if b > 0 else ''}{b}w"


def scalar_from_json(field: Field, obj) -> FieldScalar:
    """Parse a scalar literal; bare ints and rational strings are accepted."""
    if isinstance(obj, int):
        return field.scalar(obj)
    if isinstance(obj, str):
        return field.scalar(Fraction(obj))
    if isinstance(obj, dict):
        num = obj["num"]
        den = obj.get("den", 1)
        if den <= 0:
            raise FieldError(f"scalar literal needs positive den: {obj!r}")
        return field.scalar(Fraction(num[0], den), Fraction(num[1], den))
    raise FieldError(f"bad scalar literal: {obj!r}")


def field_make(degree: int, minpoly) -> Field:
    """Construct the field with omega the larger real root of x^2 = t*x + n.

    For degree 1, omega is the integer t and the field is Q.
    """
    t, n = int(minpoly[0]), int(minpoly[1])
    if degree == 1:
        return Field(1, t, 0)
    return Field(2, t, n)


def field_from_json(obj) -> Field:
    return field_make(int(obj["degree"]), obj["minpoly"])


def field_to_json(f: Field):
    return {"degree": f.degree, "minpoly": [f.t, f.n]}


def is_pisot(field: Field, lam: FieldScalar) -> bool:
    """True iff lam is a Pisot number of this field.

    lam must be an algebraic integer greater than 1.  Rational integers
    count as Pisot here (their conjugate set is empty).
    """
    a, b = lam.a, lam.b
    tr = 2 * a + b * field.t
    nm = a * a + a * b * field.t - b * b * field.n
    if b == 0:
        if a.denominator != 1:
            raise NotAlgebraicInteger(f"{lam!r} is not an algebraic integer")
    elif tr.denominator != 1 or nm.denominator != 1:
        raise NotAlgebraicInteger(f"{lam!r} is not an algebraic integer")
    if not lam > 1:
        raise NotExpanding(f"{lam!r} is not > 1")
    if b == 0 or field.degree == 1:
        return True
    conj = lam.conjugate()
    one = field.one()
    return (-one) < conj < one
