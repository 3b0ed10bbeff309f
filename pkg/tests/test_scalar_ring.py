from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from qch.scalar_ring import (
    Laurent,
    RingConfig,
    RingError,
    complete,
    elementary,
    eval_at_q,
    format_scalar,
    parse_laurent,
    parse_scalar,
    q_number,
)

Q = RingConfig.rational("7/5")


def test_q_number_small_values():
    assert q_number(0, Q) == 0
    assert q_number(1, Q) == 1
    q = mpq(7, 5)
    assert q_number(2, Q) == q + 1 / q


def test_q_number_laurent_symbolic():
    two = q_number(2, RingConfig.laurent())
    assert two == Laurent.mono(1) + Laurent.mono(-1)


def test_q_number_degenerate():
    with pytest.raises(RingError, match="degenerate q"):
        q_number(3, RingConfig.rational("1"))


def test_eval_at_q_examples():
    q = Laurent.mono(1)
    assert eval_at_q(q + Laurent.mono(-1), mpq(2)) == mpq(5, 2)
    assert eval_at_q(Laurent.const(1), mpq(9, 4)) == 1
    assert eval_at_q(q - Laurent.mono(-1), mpq(7, 5)) == mpq(24, 35)


def test_eval_at_q_pole():
    with pytest.raises((RingError, ZeroDivisionError)):
        eval_at_q(Laurent.mono(-1), mpq(0))


@pytest.mark.parametrize("k", range(2, 7))
def test_popo_consistency_of_q_numbers(k):
    # q^2 q^-k k_q - q^{1-k}(1+(k-1)_q) = q - q^{1-k}
    q = Q.qe
    lhs = q ** 2 * q ** (-k) * q_number(k, Q) - q ** (1 - k) * (1 + q_number(k - 1, Q))
    assert lhs == q - q ** (1 - k)


def test_validate_rejects_restricted_q():
    for bad in ("1", "-1", "0"):
        with pytest.raises(RingError):
            RingConfig.rational(bad).validate(3)
    RingConfig.rational("7/5").validate(8)


def test_validate_float_ring():
    with pytest.raises(RingError):
        RingConfig.floating(-1.0).validate(3)
    RingConfig.floating(1.4).validate(5)


@pytest.mark.parametrize("text", ["0", "3/2*q^2 + -1*q^0 + 5*q^-3", "1*q^1"])
def test_laurent_roundtrip(text):
    assert str(parse_laurent(text)) == text


def test_laurent_no_zero_coefficients():
    x = Laurent.mono(2) - Laurent.mono(2) + Laurent.const(3)
    assert x.as_dict() == {0: mpq(3)}


def test_scalar_text_roundtrip():
    for kind, v in (("rational", mpq(-22, 7)), ("float", complex(1.25, -0.5))):
        assert parse_scalar(format_scalar(v), kind) == v


def test_elementary_and_complete():
    e = elementary([1, 2, 3], 3)
    h = complete([1, 2, 3], 2)
    assert e == [1, 6, 11, 6]
    assert h == [1, 6, 25]


laurents = st.dictionaries(
    st.integers(-4, 4), st.fractions(min_value=-5, max_value=5, max_denominator=6), max_size=4
).map(lambda d: Laurent([(e, mpq(c.numerator, c.denominator)) for e, c in d.items()]))


@settings(max_examples=60, deadline=None)
@given(laurents, laurents, laurents)
def test_laurent_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=60, deadline=None)
@given(st.fractions(max_denominator=50), st.fractions(max_denominator=50))
def test_rational_inverses(a, b):
    x = Q.elt(mpq(a.numerator, a.denominator))
    if x != 0:
        assert x * Q.inv(x) == 1
    y = Q.elt(mpq(b.numerator, b.denominator))
    assert Fraction(int((x + y).numerator), int((x + y).denominator)) == a + b


@settings(max_examples=40, deadline=None)
@given(laurents, st.fractions(min_value=Fraction(1, 3), max_value=3, max_denominator=7))
def test_evaluation_is_a_homomorphism(a, q0):
    q0 = mpq(q0.numerator, q0.denominator)
    b = a * a + Laurent.mono(1)
    assert eval_at_q(b, q0) == eval_at_q(a, q0) ** 2 + q0
