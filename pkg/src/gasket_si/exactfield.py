"""Exact arithmetic in Q(sqrt 3).

Rationals are plain :class:`fractions.Fraction`.  A :class:`QReal` is
``a + b*sqrt(3)`` with ``a, b`` rational, stored internally over a common
positive denominator so that the hot paths only touch Python ints.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

SQRT3_FLOAT = math.sqrt(3.0)

_NUM = r"[+-]?\d+(?:/\d+)?"
_QREAL_RE = re.compile(rf"^\s*({_NUM})\s*([+-])\s*(\d+(?:/\d+)?)\s*\*\s*sqrt3\s*$")


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"expected a rational, got {type(value).__name__}")


class QReal:
    """Immutable element ``(num_a + num_b*sqrt3) / den`` of Q(sqrt 3).

    The triple is kept canonical: ``den > 0`` and
    ``gcd(num_a, num_b, den) == 1``, so equality is structural.
    """

    __slots__ = ("_na", "_nb", "_d")

    def __init__(self, a=0, b=0):
        fa, fb = _frac(a), _frac(b)
        d = fa.denominator * fb.denominator // math.gcd(fa.denominator, fb.denominator)
        self._na = fa.numerator * (d // fa.denominator)
        self._nb = fb.numerator * (d // fb.denominator)
        self._d = d

    @classmethod
    def _raw(cls, na: int, nb: int, d: int) -> "QReal":
        if d < 0:
            na, nb, d = -na, -nb, -d
        g = math.gcd(na, nb, d)
        if g != 1:
            na //= g
            nb //= g
            d //= g
        obj = object.__new__(cls)
        obj._na = na
        obj._nb = nb
        obj._d = d
        return obj

    @classmethod
    def coerce(cls, value) -> "QReal":
        if isinstance(value, QReal):
            return value
        f = _frac(value)
        return cls._raw(f.numerator, 0, f.denominator)

    # -- components -------------------------------------------------------

    @property
    def a(self) -> Fraction:
        return Fraction(self._na, self._d)

    @property
    def b(self) -> Fraction:
        return Fraction(self._nb, self._d)

    def is_rational(self) -> bool:
        return self._nb == 0

    def conjugate(self) -> "QReal":
        return QReal._raw(self._na, -self._nb, self._d)

    def norm(self) -> Fraction:
        """Field norm ``a**2 - 3*b**2``."""
        return Fraction(self._na * self._na - 3 * self._nb * self._nb, self._d * self._d)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QReal):
            try:
                other = QReal.coerce(other)
            except TypeError:
                return NotImplemented
        if self._d == other._d:
            return QReal._raw(self._na + other._na, self._nb + other._nb, self._d)
        return QReal._raw(
            self._na * other._d + other._na * self._d,
            self._nb * other._d + other._nb * self._d,
            self._d * other._d,
        )

    __radd__ = __add__

    def __neg__(self):
        return QReal._raw(-self._na, -self._nb, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, QReal):
            try:
                other = QReal.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QReal):
            try:
                other = QReal.coerce(other)
            except TypeError:
                return NotImplemented
        a1, b1, a2, b2 = self._na, self._nb, other._na, other._nb
        return QReal._raw(a1 * a2 + 3 * b1 * b2, a1 * b2 + a2 * b1, self._d * other._d)

    __rmul__ = __mul__

    def inverse(self) -> "QReal":
        n = self._na * self._na - 3 * self._nb * self._nb
        if n == 0:
            raise ZeroDivisionError("QReal inverse of zero")
        # (a + b r)/d inverted: d (a - b r) / (a^2 - 3 b^2)
        return QReal._raw(self._d * self._na, -self._d * self._nb, n)

    def __truediv__(self, other):
        if not isinstance(other, QReal):
            try:
                other = QReal.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return QReal.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QReal._raw(1, 0, 1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- order ------------------------------------------------------------

    def sign(self) -> int:
        a, b = self._na, self._nb
        if a >= 0 and b >= 0:
            return 0 if (a == 0 and b == 0) else 1
        if a <= 0 and b <= 0:
            return -1
        # mixed signs: compare a^2 with 3 b^2
        diff = a * a - 3 * b * b
        if diff > 0:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __eq__(self, other):
        if isinstance(other, QReal):
            return self._na == other._na and self._nb == other._nb and self._d == other._d
        try:
            other = QReal.coerce(other)
        except TypeError:
            return NotImplemented
        return self == other

    def __hash__(self):
        if self._nb == 0:
            return hash(Fraction(self._na, self._d))
        return hash((self._na, self._nb, self._d))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return self._na != 0 or self._nb != 0

    def __float__(self):
        if self._nb == 0:
            return self._na / self._d
        return (self._na + self._nb * SQRT3_FLOAT) / self._d

    # -- text -------------------------------------------------------------

    def __repr__(self):
        return f"QReal({self.a!s}, {self.b!s})"

    def __str__(self):
        b = self.b
        op = "-" if b < 0 else "+"
        return f"{_fmt(self.a)}{op}{_fmt(abs(b))}*sqrt3"

    @classmethod
    def parse(cls, text: str) -> "QReal":
        """Inverse of ``str``: ``"a/b+c/d*sqrt3"``; a bare rational is accepted too."""
        m = _QREAL_RE.match(text)
        if m:
            b = Fraction(m.group(3))
            return cls(Fraction(m.group(1)), -b if m.group(2) == "-" else b)
        try:
            return cls(Fraction(text.strip()))
        except ValueError:
            raise ValueError(f"not a QReal literal: {text!r}") from None


def _fmt(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


ZERO = QReal(0)
ONE = QReal(1)
SQRT3 = QReal(0, 1)
HALF_SQRT3 = QReal(0, Fraction(1, 2))


def qadd(x: QReal, y: QReal) -> QReal:
    return x + y


def qmul(x: QReal, y: QReal) -> QReal:
    return x * y


def qneg(x: QReal) -> QReal:
    return -x


def qinv(x: QReal) -> QReal:
    return x.inverse()


def qsign(x: QReal) -> int:
    return x.sign()


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` (or an integer) into a Fraction; floats are refused."""
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ValueError(f"expected a rational 'p/q', got {text!r}")
    return Fraction(text)
