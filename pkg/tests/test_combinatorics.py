import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catseries import (
    UsageError,
    catalan,
    cf_eval,
    central_binomial,
    half_integer_binomial,
    harmonic,
    odd_harmonic,
    odd_product,
    parse_form,
    quarter_harmonic_diff,
)
from catseries.combinatorics import falling_binomial, half_integer_binomial_lower, harmonic_at


def pascal_row(n: int) -> list[int]:
    row = [1]
    for _ in range(n):
        row = [a + b for a, b in zip([0] + row, row + [0])]
    return row


class TestCatalan:
    @pytest.mark.parametrize("k,expected", [(0, 1), (5, 42), (10, 16796)])
    def test_values(self, k, expected):
        assert catalan(k) == expected

    def test_first_terms(self):
        assert [catalan(k) for k in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]

    def test_recurrence_and_binomial(self):
        for j in range(501):
            assert (j + 2) * catalan(j + 1) == 2 * (2 * j + 1) * catalan(j)
            assert catalan(j) * (j + 1) == math.comb(2 * j, j)

    def test_negative(self):
        with pytest.raises(UsageError):
            catalan(-1)


class TestCentralBinomial:
    @pytest.mark.parametrize("k,expected", [(0, 1), (4, 70), (10, 184756)])
    def test_values(self, k, expected):
        assert central_binomial(k) == expected

    def test_against_pascal(self):
        for k in range(30):
            assert central_binomial(k) == pascal_row(2 * k)[k]


class TestHarmonic:
    def test_values(self):
        assert harmonic(0) == 0
        assert harmonic(4) == Fraction(25, 12)
        assert harmonic(3) == Fraction(11, 6)

    def test_odd_values(self):
        assert odd_harmonic(0) == 0
        assert odd_harmonic(3) == Fraction(23, 15)
        assert odd_harmonic(-3) == Fraction(23, 15)

    def test_odd_symmetry(self):
        for n in range(51):
            assert odd_harmonic(-n) == odd_harmonic(n)

    def test_odd_from_harmonic(self):
        # O_n = H_{2n} - H_n / 2
        for n in range(40):
            assert odd_harmonic(n) == harmonic(2 * n) - harmonic(n) / 2

    def test_half_integer_extension(self):
        """2 O_n - 2 ln 2 against H_{1/2} = 2 - 2 ln 2 stepped up by 1/r."""
        ln2 = parse_form("ln2")
        for n in range(1, 11):
            closed = cf_eval(odd_harmonic(n) * 2 - ln2 * 2, 256)
            start = cf_eval(2 - ln2 * 2, 256)
            stepped = start + harmonic_at(Fraction(2 * n - 1, 2), Fraction(1, 2))
            assert closed.overlaps(stepped)
            with mpmath.workdps(80):
                reference = mpmath.harmonic(mpmath.mpf(2 * n - 1) / 2)
                assert abs(mpmath.mpf(closed.value) - reference) < mpmath.mpf(10) ** -70


class TestOddProduct:
    @pytest.mark.parametrize("k,m,expected", [(2, 1, Fraction(1, 3)), (0, 2, Fraction(1, 3)), (5, 3, Fraction(1, 315))])
    def test_values(self, k, m, expected):
        assert odd_product(k, m) == expected

    def test_empty(self):
        assert all(odd_product(k, 0) == 1 for k in range(10))

    @given(st.integers(0, 60), st.integers(0, 30))
    def test_literal_product(self, k, m):
        value = Fraction(1)
        for j in range(1, m + 1):
            value /= 2 * k - 2 * j + 1
        assert odd_product(k, m) == value


def gamma_binomial(r: Fraction, s: int) -> Fraction:
    """binom(r, s) from mpmath's Gamma-based binomial, rounded to a rational."""
    with mpmath.workdps(60):
        return mpmath.binomial(mpmath.mpf(r.numerator) / r.denominator, s)


class TestHalfIntegerBinomial:
    def test_examples(self):
        assert half_integer_binomial(0, 0) == Fraction(1, 2)
        assert half_integer_binomial(1, 1) == Fraction(3, 8)

    def test_lower_form(self):
        for k in range(11):
            expected = Fraction((-1) ** k * central_binomial(k), 4**k)
            assert half_integer_binomial_lower(0, k) == expected

    def test_against_gamma_definition(self):
        for r in range(6):
            for k in range(8):
                value = half_integer_binomial(r, k)
                with mpmath.workdps(60):
                    ref = gamma_binomial(Fraction(2 * r + 1, 2), k + 1)
                    assert abs(mpmath.mpf(value.numerator) / value.denominator - ref) < mpmath.mpf(10) ** -50

    def test_catalan_bridge(self):
        for r in range(26):
            scale = Fraction((-1) ** r * math.factorial(r + 2) * catalan(r + 1), 2 ** (r + 2))
            for k in range(26):
                right = scale * (-1) ** k * Fraction(catalan(k), 4**k) * odd_product(k, r)
                assert half_integer_binomial(r, k) == right

    def test_falling_integer_case(self):
        assert falling_binomial(Fraction(5), 2) == 10
        assert falling_binomial(Fraction(2), 3) == 0


def digamma_difference(m: int):
    """H_{3(2m+1)/4} - H_{(2m+1)/4} from mpmath's digamma."""
    with mpmath.workdps(60):
        low = mpmath.mpf(2 * m + 1) / 4
        return mpmath.digamma(3 * low + 1) - mpmath.digamma(low + 1)


class TestQuarterHarmonicDiff:
    def test_displayed_values(self):
        assert quarter_harmonic_diff(0) == parse_form("pi - 8/3")
        assert quarter_harmonic_diff(1) == parse_form("176/45 - pi")

    def test_m_two(self):
        assert quarter_harmonic_diff(2) == parse_form("pi - 872/385")

    @pytest.mark.parametrize("m", range(12))
    def test_against_digamma(self, m):
        value = cf_eval(quarter_harmonic_diff(m), 128)
        with mpmath.workdps(60):
            assert abs(mpmath.mpf(value.value) - digamma_difference(m)) < mpmath.mpf(10) ** -35

    def test_pi_sign_alternates(self):
        for m in range(1, 11):
            both = quarter_harmonic_diff(m) + quarter_harmonic_diff(m - 1)
            assert both.is_rational()
            assert quarter_harmonic_diff(m).coefficient((1, 0, 0, 0)) == (-1) ** m

    def test_negative(self):
        with pytest.raises(UsageError):
            quarter_harmonic_diff(-1)
