import random
import threading
from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from catseries import DomainError, TrackedReal, UsageError, agm, constant, log_gamma, real_from_rational
from catseries.precision import (
    ConstantCache,
    bernoulli,
    gamma_quarter_agm,
    ln2_atanh,
    ln2_halving,
    pi_agm,
    pi_machin,
)


def within(x: TrackedReal, reference, slack=0) -> bool:
    """True when an mpmath reference lies inside x's radius (plus slack)."""
    with mpmath.workdps(250):
        gap = abs(mpmath.mpf(x.value) - reference)
        return gap <= mpmath.mpf(x.radius) + mpmath.mpf(slack)


class TestRealFromRational:
    def test_one_third(self):
        x = real_from_rational(Fraction(1, 3), 128)
        assert x.radius <= mpfr(2) ** -126
        assert x.contains(Fraction(1, 3))

    def test_zero_is_exact(self):
        x = real_from_rational(0, 256)
        assert x.value == 0 and x.radius == 0

    def test_against_high_precision_division(self):
        x = real_from_rational(Fraction(23, 15), 128)
        assert x.radius <= mpfr(2) ** -126 * 2
        with mpmath.workdps(160):
            assert within(x, mpmath.mpf(23) / 15)

    def test_dyadic_values_are_exact(self):
        assert real_from_rational(Fraction(3, 8), 64).radius == 0

    def test_rejects_low_precision(self):
        with pytest.raises(UsageError):
            real_from_rational(1, 32)

    @given(st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**9))
    def test_rounding_contract(self, q):
        x = real_from_rational(q, 96)
        assert x.contains(q)
        assert x.radius <= abs(mpfr(q.numerator) / q.denominator) * mpfr(2) ** -94 + 0


class TestAgm:
    def test_fixed_point(self):
        x = real_from_rational(Fraction(7, 3), 128)
        assert agm(x, x).contains(x)

    def test_one_one(self):
        one = real_from_rational(1, 128)
        assert agm(one, one).contains(1)

    def test_one_root_two(self):
        root2 = real_from_rational(2, 128).sqrt()
        value = agm(real_from_rational(1, 128), root2)
        with mpmath.workdps(60):
            assert within(value, mpmath.agm(1, mpmath.sqrt(2)))
        assert abs(float(value) - 1.19814) < 1e-5

    @pytest.mark.parametrize("a,b", [(0, 1), (-1, 2)])
    def test_domain(self, a, b):
        with pytest.raises(DomainError):
            agm(real_from_rational(a, 64), real_from_rational(b, 64))

    @given(
        st.fractions(min_value=Fraction(1, 100), max_value=100, max_denominator=1000),
        st.fractions(min_value=Fraction(1, 100), max_value=100, max_denominator=1000),
    )
    @settings(max_examples=60)
    def test_symmetric(self, a, b):
        x = agm(real_from_rational(a, 128), real_from_rational(b, 128))
        y = agm(real_from_rational(b, 128), real_from_rational(a, 128))
        assert x.overlaps(y)


REFERENCES = {
    "PI": lambda: mpmath.pi,
    "LN2": lambda: mpmath.ln(2),
    "SQRT2": lambda: mpmath.sqrt(2),
    "GAMMA_QUARTER": lambda: mpmath.gamma(mpmath.mpf(1) / 4),
}


class TestConstants:
    @pytest.mark.parametrize("name", sorted(REFERENCES))
    @pytest.mark.parametrize("prec", [64, 128, 256, 512])
    def test_against_mpmath(self, name, prec):
        value = constant(name, prec)
        assert value.radius <= mpfr(2) ** (-prec + 4)
        with mpmath.workdps(200):
            assert within(value, REFERENCES[name]())

    def test_examples(self):
        assert constant("PI", 128).to_decimal(20).startswith("3.14159265358979")
        assert constant("LN2", 128).to_decimal(20).startswith("6.9314718055994")
        assert constant("GAMMA_QUARTER", 128).to_decimal(20).startswith("3.6256099082")

    @pytest.mark.parametrize("prec", [128, 256, 512])
    def test_pi_two_algorithms(self, prec):
        assert pi_agm(prec).overlaps(pi_machin(prec), mpfr(2) ** (-prec + 8))

    def test_pi_two_algorithms_tight(self):
        assert pi_agm(128).overlaps(pi_machin(128), mpfr(2) ** -120)

    def test_ln2_two_algorithms(self):
        assert ln2_atanh(256).overlaps(ln2_halving(256), mpfr(2) ** -248)

    def test_gamma_quarter_two_routes(self):
        assert gamma_quarter_agm(256).overlaps(log_gamma(Fraction(1, 4), 256).exp(), mpfr(2) ** -248)

    def test_unknown_name(self):
        with pytest.raises(UsageError):
            constant("E", 128)

    def test_nested_intervals(self):
        for name in REFERENCES:
            values = [constant(name, p) for p in (64, 128, 256, 512)]
            for i, low in enumerate(values):
                for high in values[i + 1 :]:
                    assert low.contains(high), name

    def test_cache_returns_one_object_under_threads(self):
        cache = ConstantCache()
        seen = []

        def worker():
            seen.append(cache.get("PI", 320))

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len({id(v) for v in seen}) == 1 or all(v == seen[0] for v in seen)
        assert cache.get("PI", 320) is cache.get("PI", 320)


class TestLogGamma:
    def test_one(self):
        assert log_gamma(1, 128).contains(0)

    def test_half(self):
        assert log_gamma(Fraction(1, 2), 128).overlaps(constant("PI", 160).log() * Fraction(1, 2))

    def test_quarter_matches_constant(self):
        lg = log_gamma(Fraction(1, 4), 256)
        assert lg.overlaps(constant("GAMMA_QUARTER", 256).log(), mpfr(2) ** -248)

    def test_radius_contract(self):
        assert log_gamma(Fraction(7, 3), 200).radius <= mpfr(2) ** -194

    @pytest.mark.parametrize("x", [0, -1, Fraction(-1, 2)])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            log_gamma(x, 128)

    @given(st.fractions(min_value=Fraction(1, 50), max_value=60, max_denominator=997))
    @settings(max_examples=40)
    def test_against_mpmath(self, x):
        with mpmath.workdps(120):
            ref = mpmath.loggamma(mpmath.mpf(x.numerator) / x.denominator)
            assert within(log_gamma(x, 256), ref, mpmath.mpf(2) ** -250)

    def test_tracked_argument(self):
        x = real_from_rational(2, 128).sqrt()
        with mpmath.workdps(80):
            assert within(log_gamma(x, 128), mpmath.loggamma(mpmath.sqrt(2)), 1e-36)

    def test_functional_equation(self):
        rng = random.Random(50)
        for _ in range(50):
            x = Fraction(rng.randint(10, 2000), 100)
            ratio = log_gamma(x + 1, 128).exp() / log_gamma(x, 128).exp()
            assert ratio.contains(x) or ratio.overlaps(real_from_rational(x, 128))

    def test_bernoulli_numbers(self):
        assert [bernoulli(n) for n in (0, 1, 2, 4, 6, 12)] == [
            1, Fraction(-1, 2), Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-691, 2730)
        ]


# -- random expression trees -----------------------------------------------------------

_LEAVES = ("PI", "LN2", "SQRT2", "GAMMA_QUARTER")


def _build(rng: random.Random, depth: int):
    """A random expression as nested tuples; evaluated later at two precisions."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.4:
            return ("const", rng.choice(_LEAVES))
        return ("rat", Fraction(rng.randint(-999, 999) or 1, rng.randint(1, 999)))
    op = rng.choice(("+", "-", "*", "/", "sqrt", "exp", "log", "sin", "cos", "pow"))
    if op in ("sqrt", "exp", "log", "sin", "cos"):
        return (op, _build(rng, depth - 1))
    if op == "pow":
        return (op, _build(rng, depth - 1), rng.randint(-3, 4))
    return (op, _build(rng, depth - 1), _build(rng, depth - 1))


class _Skip(Exception):
    pass


def _eval(node, prec: int) -> TrackedReal:
    kind = node[0]
    if kind == "const":
        return constant(node[1], prec)
    if kind == "rat":
        return real_from_rational(node[1], prec)
    if kind == "pow":
        base = _eval(node[1], prec)
        if node[2] < 0 and not (base.is_positive() or base.is_negative()):
            raise _Skip
        if base.magnitude() > 1e6:
            raise _Skip
        return base ** node[2]
    if kind in ("sqrt", "exp", "log", "sin", "cos"):
        x = _eval(node[1], prec)
        if kind == "sqrt":
            return abs(x).sqrt() if abs(x).is_positive() else x * 0
        if kind == "exp":
            if x.magnitude() > 30:
                raise _Skip
            return x.exp()
        if kind == "log":
            if not abs(x).is_positive():
                raise _Skip
            return abs(x).log()
        if x.magnitude() > 1e6:
            raise _Skip
        return x.sin() if kind == "sin" else x.cos()
    a, b = _eval(node[1], prec), _eval(node[2], prec)
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    if not (b.is_positive() or b.is_negative()):
        raise _Skip
    return a / b


@given(st.integers(min_value=0, max_value=2**32))
@settings(max_examples=1000)
def test_error_radius_soundness(seed):
    tree = _build(random.Random(seed), 5)
    try:
        low = _eval(tree, 128)
        high = _eval(tree, 256)
    except _Skip:
        return
    if low.radius > 1e-10:  # catastrophic but still sound; nothing to compare
        assert low.contains(high) or low.overlaps(high)
        return
    with mpmath.workdps(200):
        gap = abs(mpmath.mpf(low.value) - mpmath.mpf(high.value))
        assert gap <= mpmath.mpf(low.radius) + mpmath.mpf(high.radius), tree
    assert low.contains(high)
