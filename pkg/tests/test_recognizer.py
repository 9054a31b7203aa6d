from fractions import Fraction

import mpmath
import pytest

from catseries import PrecisionError, UsageError, cf_eval, parse_form, pslq, real_from_rational, recognize, recognize_sum
from catseries.recognizer import detection_threshold

from oracles import random_combinations

PREC = 256


def forms(*texts):
    return [parse_form(t) for t in texts]


def test_square_root_relation():
    values = [cf_eval(f, PREC + 32) for f in forms("1", "sqrt2", "1 + sqrt2")]
    result = pslq(values, 1000, PREC)
    assert result.coefficients == (1, 1, -1)
    assert result.residual.value <= detection_threshold(PREC, 3)


def test_no_relation_within_bound():
    with mpmath.workdps(120):
        e = mpmath.e
        mant, exp = mpmath.frexp(e)
    # e as an exact dyadic rational accurate to about 390 bits
    e_q = Fraction(int(mpmath.ldexp(mant, 400)), 2 ** (400 - exp))
    values = [cf_eval(parse_form("1"), PREC), cf_eval(parse_form("pi"), PREC), real_from_rational(e_q, PREC)]
    assert not pslq(values, 1000, PREC).found


def test_agrees_with_mpmath():
    values = [cf_eval(f, PREC + 32) for f in forms("1", "pi^-1", "8 - 16*pi^-1")]
    ours = pslq(values, 10**6, PREC).coefficients
    with mpmath.workdps(80):
        theirs = mpmath.pslq([mpmath.mpf(v.value) for v in values], maxcoeff=10**6, maxsteps=10**5)
    assert theirs is not None
    assert ours in (tuple(theirs), tuple(-c for c in theirs))


def test_precision_preconditions():
    values = [cf_eval(f, PREC) for f in forms("1", "pi", "pi^-1")]
    with pytest.raises(PrecisionError):
        pslq(values, 100, 128)
    coarse = [cf_eval(f, 128) for f in forms("1", "pi")]
    with pytest.raises(PrecisionError):
        pslq(coarse, 100, 256)
    with pytest.raises(UsageError):
        pslq(values[:1], 100, 256)


def test_recognize_first_family():
    assert recognize_sum("F1a", 0, forms("1", "pi*G^-4")) == parse_form("8 - 384*pi*G^-4")


def test_recognize_fourth_power_log():
    expected = parse_form("12 - 160*pi^-2 + 64*ln2*pi^-2")
    assert recognize_sum("F7", 0, forms("1", "pi^-2", "ln2*pi^-2")) == expected


@pytest.mark.parametrize("m,expected", [(0, "2*pi^-1"), (1, "2*pi^-1"), (2, "2/27*pi^-1")])
def test_recognize_central_family(m, expected):
    assert recognize_sum("F8", m, forms("1", "pi^-1")) == parse_form(expected)


def test_denominator_bound_rejects():
    value = cf_eval(parse_form("1/20011*pi"), 320)
    assert recognize(value, forms("1", "pi"), denom_bound=10**4) is None
    assert recognize(value, forms("1", "pi"), denom_bound=10**5) == parse_form("1/20011*pi")


def test_recognize_rejects_bad_basis():
    value = cf_eval(parse_form("pi"), 256)
    with pytest.raises(UsageError):
        recognize(value, [])
    with pytest.raises(UsageError):
        recognize(value, forms("pi", "pi"))


def test_outside_span_is_absent():
    value = cf_eval(parse_form("sqrt2*pi"), 320)
    assert recognize(value, forms("1", "pi", "pi^-1")) is None


def test_round_trip_and_stability():
    failures = []
    for basis, form in random_combinations(200):
        prec = 64 * (len(basis) + 1)
        value = cf_eval(form, prec + 64)
        found = recognize(value, basis, prec=prec)
        if found != form:
            failures.append((basis, form, found))
            continue
        # a found relation must survive a doubled working precision
        doubled = recognize(cf_eval(form, 2 * prec + 64), basis, prec=2 * prec)
        if doubled != form:
            failures.append((basis, form, doubled))
    assert not failures, failures[:3]


def test_soundness_of_reported_forms():
    for basis, form in random_combinations(40, seed=7):
        prec = 64 * (len(basis) + 1)
        value = cf_eval(form, prec + 64)
        found = recognize(value, basis, prec=prec)
        if found is not None:
            assert value.overlaps(cf_eval(found, prec + 64), detection_threshold(prec, value.magnitude()))
