from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catseries import ClosedForm, DomainError, UsageError, cf_eval, parse_form

keys = st.tuples(st.integers(-6, 6), st.integers(-8, 8), st.integers(0, 3), st.integers(0, 1))
coefficients = st.fractions(min_value=-1000, max_value=1000, max_denominator=500).filter(bool)
forms = st.dictionaries(keys, coefficients, max_size=5).map(ClosedForm)


def test_zero_coefficients_are_dropped():
    cf = ClosedForm({(0, 0, 0, 0): 1, (1, 0, 0, 0): 0})
    assert cf.terms == {(0, 0, 0, 0): 1}


def test_sqrt2_is_folded():
    assert ClosedForm.monomial(3, d=2) == ClosedForm.rational(6)
    assert ClosedForm.monomial(1, d=3) == ClosedForm.monomial(2, d=1)
    assert ClosedForm.monomial(1, d=-1) == ClosedForm.monomial(Fraction(1, 2), d=1)


def test_negative_log_power_is_rejected():
    with pytest.raises(DomainError):
        ClosedForm.monomial(1, c=-1)
    with pytest.raises(DomainError):
        ClosedForm.monomial(1, c=1).inverse()


def test_inverse_requires_monomial():
    with pytest.raises(DomainError):
        parse_form("1 + pi").inverse()


def test_arithmetic():
    pi = ClosedForm.monomial(1, a=1)
    g = ClosedForm.monomial(1, b=1)
    expr = 8 - 384 * pi / g**4
    assert expr.terms == {(0, 0, 0, 0): 8, (1, -4, 0, 0): -384}
    assert (pi * pi).terms == {(2, 0, 0, 0): 1}
    assert pi / pi == 1
    assert ClosedForm.monomial(1, d=1) * ClosedForm.monomial(1, d=1) == 2


def test_pretty_printing():
    assert str(parse_form("8 - 384*pi*G^-4")) == "8 - 384*pi*G^-4"
    assert str(ClosedForm()) == "0"
    assert str(parse_form("-pi")) == "-pi"
    assert str(ClosedForm.monomial(Fraction(1, 4), a=-3, b=4)) == "1/4*pi^-3*G^4"


def test_parse_errors():
    for bad in ("", "pi**", "8 - x"):
        with pytest.raises(UsageError):
            parse_form(bad)


def test_json_encoding():
    cf = parse_form("12 - 160*pi^-2 + 64*pi^-2*ln2")
    assert cf.to_json() == {"0,0,0,0": "12/1", "-2,0,0,0": "-160/1", "-2,0,1,0": "64/1"}


@given(forms)
def test_text_round_trip(cf):
    assert parse_form(str(cf)) == cf


@given(forms)
def test_json_round_trip(cf):
    assert ClosedForm.from_json(cf.to_json()) == cf


@given(forms, forms, forms)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * (b + c) == a * b + a * c
    assert (a - a) == ClosedForm()


@given(forms, forms)
def test_evaluation_is_additive(a, b):
    total = cf_eval(a + b, 128)
    assert total.overlaps(cf_eval(a, 128) + cf_eval(b, 128))


def test_evaluation_examples():
    value = cf_eval(parse_form("8 - 384*pi*G^-4"), 128)
    with mpmath.workdps(40):
        assert abs(mpmath.mpf(value.value) - (8 - 384 * mpmath.pi / mpmath.gamma(0.25) ** 4)) < 1e-35
    assert abs(float(value) - 1.0184) < 1e-4
    assert abs(float(cf_eval(parse_form("2*pi^-1"), 128)) - 0.636620) < 1e-6
    zero = cf_eval(ClosedForm(), 128)
    assert zero.value == 0 and zero.radius == 0
