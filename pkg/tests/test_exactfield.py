import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gasket_si.exactfield import QReal, parse_rational, qadd, qinv, qmul, qneg, qsign

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60)
qreals = st.builds(QReal, rationals, rationals)


def test_identity_action():
    assert qmul(QReal(1, 0), QReal(0, 1)) == QReal(0, 1)


def test_conjugate_product():
    assert QReal(1, 1) * QReal(1, -1) == QReal(-2, 0)


def test_inverse_of_sqrt3():
    inv = qinv(QReal(0, 1))
    assert inv == QReal(0, Fraction(1, 3))
    assert QReal(0, 1) * inv == 1


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        qinv(QReal(0))


@pytest.mark.parametrize(
    "x, expected",
    [(QReal(2, -1), 1), (QReal(-5, 3), 1), (QReal(0, 0), 0), (QReal(5, -3), -1), (QReal(-2, 1), -1)],
)
def test_sign_examples(x, expected):
    assert qsign(x) == expected


def test_components_are_reduced():
    x = QReal(Fraction(2, 4), Fraction(6, 8))
    assert (x.a, x.b) == (Fraction(1, 2), Fraction(3, 4))
    assert x == QReal(Fraction(1, 2), Fraction(3, 4))
    assert hash(QReal(3)) == hash(3)


@settings(max_examples=200, deadline=None)
@given(qreals, qreals, qreals)
def test_field_axioms(x, y, z):
    assert qadd(qadd(x, y), z) == qadd(x, qadd(y, z))
    assert qmul(qmul(x, y), z) == qmul(x, qmul(y, z))
    assert x * (y + z) == x * y + x * z
    assert x + qneg(x) == 0
    if x:
        assert x * qinv(x) == 1
        assert (y / x) * x == y


@settings(max_examples=300, deadline=None)
@given(qreals)
def test_sign_matches_float(x):
    val = float(x.a) + float(x.b) * 1.7320508075688772
    if abs(val) > 1e-6:
        assert qsign(x) == (1 if val > 0 else -1)


@settings(max_examples=100, deadline=None)
@given(qreals, qreals)
def test_order_is_consistent(x, y):
    assert (x < y) == (qsign(y - x) > 0)
    assert (x <= y) and (y <= x) if x == y else (x < y) != (y < x)


@given(qreals)
def test_string_round_trip(x):
    assert QReal.parse(str(x)) == x


def test_serialisation_format():
    assert str(QReal(Fraction(1, 2), Fraction(-3, 4))) == "1/2-3/4*sqrt3"
    assert str(QReal(0, 0)) == "0/1+0/1*sqrt3"


def test_float_and_power():
    assert float(QReal(1, 1)) == pytest.approx(1 + math.sqrt(3))
    assert QReal(0, 1) ** 2 == 3
    assert QReal(2, 1) ** -1 == QReal(2, -1)


@pytest.mark.parametrize("text", ["0.25", "1/0x", "", "a/b"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)
