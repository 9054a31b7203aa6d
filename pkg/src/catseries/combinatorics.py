"""Exact combinatorial quantities over the integers and rationals.

Everything here returns ``int`` or ``fractions.Fraction``; nothing is rounded.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

from .errors import UsageError
from .forms import ClosedForm

__all__ = [
    "catalan",
    "central_binomial",
    "harmonic",
    "odd_harmonic",
    "odd_product",
    "odd_product_denominator",
    "half_integer_binomial",
    "half_integer_binomial_lower",
    "falling_binomial",
    "quarter_harmonic_diff",
    "harmonic_at",
]

_CATALAN: list[int] = [1]
_CATALAN_LOCK = threading.Lock()


def _require_nonneg(name: str, value: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise UsageError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise UsageError(f"{name} must be non-negative, got {value}")


def catalan(k: int) -> int:
    """C_k by the recurrence (j + 2) C_{j+1} = 2 (2j + 1) C_j, memoized."""
    _require_nonneg("k", k)
    if k < len(_CATALAN):
        return _CATALAN[k]
    with _CATALAN_LOCK:
        # readers never see a partially built table: append is atomic
        while len(_CATALAN) <= k:
            j = len(_CATALAN) - 1
            _CATALAN.append(2 * (2 * j + 1) * _CATALAN[j] // (j + 2))
    return _CATALAN[k]


def central_binomial(k: int) -> int:
    """binom(2k, k)."""
    _require_nonneg("k", k)
    return math.comb(2 * k, k)


def harmonic(n: int) -> Fraction:
    """H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0."""
    _require_nonneg("n", n)
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


def odd_harmonic(n: int) -> Fraction:
    """O_n = 1 + 1/3 + ... + 1/(2n - 1); negative n uses O_{-n} = O_n."""
    if not isinstance(n, int):
        raise UsageError(f"n must be an integer, got {n!r}")
    n = abs(n)
    return sum((Fraction(1, 2 * j - 1) for j in range(1, n + 1)), Fraction(0))


def odd_product_denominator(k: int, m: int) -> int:
    """The integer (2k - 1)(2k - 3) ... (2k - 2m + 1); 1 when m = 0."""
    out = 1
    for j in range(1, m + 1):
        out *= 2 * k - 2 * j + 1
    return out


def odd_product(k: int, m: int) -> Fraction:
    """prod_{j=1}^{m} 1/(2k - 2j + 1), exact. Factors are odd, so never zero."""
    _require_nonneg("k", k)
    _require_nonneg("m", m)
    return Fraction(1, odd_product_denominator(k, m))


def falling_binomial(x: Fraction, n: int) -> Fraction:
    """binom(x, n) = x (x - 1) ... (x - n + 1) / n! for rational x, integer n >= 0."""
    _require_nonneg("n", n)
    x = Fraction(x)
    num = Fraction(1)
    for i in range(n):
        num *= x - i
    return num / math.factorial(n)


def half_integer_binomial(r: int, k: int) -> Fraction:
    """binom(r + 1/2, k + 1) for non-negative integers r, k."""
    _require_nonneg("r", r)
    _require_nonneg("k", k)
    return falling_binomial(Fraction(2 * r + 1, 2), k + 1)


def half_integer_binomial_lower(r: int, k: int) -> Fraction:
    """binom(r - 1/2, k) for non-negative integers r, k."""
    _require_nonneg("r", r)
    _require_nonneg("k", k)
    return falling_binomial(Fraction(2 * r - 1, 2), k)


def harmonic_at(r: Fraction, base: Fraction) -> Fraction:
    """H_r - H_base for r - base a non-negative integer, via H_r = H_{r-1} + 1/r."""
    r, base = Fraction(r), Fraction(base)
    steps = r - base
    if steps.denominator != 1 or steps < 0:
        raise UsageError(f"{r} is not reachable from {base} by unit steps")
    return sum((1 / (base + i) for i in range(1, int(steps) + 1)), Fraction(0))


def quarter_harmonic_diff(m: int) -> ClosedForm:
    """H_{3(2m+1)/4} - H_{(2m+1)/4} as ``q + s*pi`` with s = +1 or -1.

    Both arguments are reduced to the offsets 1/4 and 3/4, where
    H_{3/4} - H_{1/4} = pi - 8/3 (reflection with cot(pi/4) = 1).
    """
    _require_nonneg("m", m)
    low = Fraction(2 * m + 1, 4)
    high = 3 * low
    low_base = low - int(low)
    high_base = high - int(high)
    # the two offsets always differ: one is 1/4 and the other 3/4
    rational = harmonic_at(high, high_base) - harmonic_at(low, low_base)
    base_diff = ClosedForm.monomial(1, a=1) - Fraction(8, 3)
    if high_base == Fraction(1, 4):
        base_diff = -base_diff
    return base_diff + rational
