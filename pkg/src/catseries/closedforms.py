"""Quarter-integer Gamma values and the right-hand sides of every series family.

All right-hand sides are assembled as exact :class:`ClosedForm` values; the
only numeric step is :func:`cf_eval`.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import Callable

from .combinatorics import (
    catalan,
    central_binomial,
    harmonic,
    odd_harmonic,
    odd_product,
    quarter_harmonic_diff,
)
from .errors import UsageError
from .forms import ClosedForm
from .precision import MIN_PREC, TrackedReal, constant, real_from_rational

__all__ = [
    "FamilyId",
    "cf_eval",
    "gamma_quarter_cf",
    "gamma_ratio_cf",
    "gprod",
    "sign_cos_plus",
    "sign_sin_plus",
    "sign_cos_minus",
    "sign_sin_minus",
    "rhs",
    "min_m",
    "PI",
    "G",
    "LN2",
    "SQRT2",
]

PI = ClosedForm.monomial(1, a=1)
G = ClosedForm.monomial(1, b=1)
LN2 = ClosedForm.monomial(1, c=1)
SQRT2 = ClosedForm.monomial(1, d=1)


class FamilyId(str, enum.Enum):
    F1 = "F1"
    F1a = "F1a"
    F1b = "F1b"
    F2 = "F2"
    F3 = "F3"
    F3a = "F3a"
    F3b = "F3b"
    F4 = "F4"
    F5 = "F5"
    F6 = "F6"
    F7 = "F7"
    F8 = "F8"
    F9 = "F9"
    F10 = "F10"
    F11 = "F11"
    F11a = "F11a"
    F11b = "F11b"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: "str | FamilyId") -> "FamilyId":
        if isinstance(text, FamilyId):
            return text
        for member in cls:
            if member.value.lower() == str(text).strip().lower():
                return member
        raise UsageError(f"unknown family {text!r}; expected one of {', '.join(m.value for m in cls)}")


_MIN_M = {FamilyId.F1b: 1, FamilyId.F3b: 1, FamilyId.F10: 1}


def min_m(family: FamilyId) -> int:
    """Smallest admissible parameter for ``family``."""
    return _MIN_M.get(FamilyId.parse(family), 0)


def _check_m(family: FamilyId, m: int) -> None:
    if not isinstance(m, int) or isinstance(m, bool):
        raise UsageError(f"m must be an integer, got {m!r}")
    lo = min_m(family)
    if m < lo:
        raise UsageError(f"{family} requires m >= {lo}, got m = {m}")


# -- evaluation ----------------------------------------------------------------


def cf_eval(cf: ClosedForm, prec: int) -> TrackedReal:
    """Numeric value of ``cf`` with a propagated error radius."""
    if prec < MIN_PREC:
        raise UsageError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    wp = prec + 32
    base = {
        0: constant("PI", wp),
        1: constant("GAMMA_QUARTER", wp),
        2: constant("LN2", wp),
        3: constant("SQRT2", wp),
    }
    powers: dict[tuple[int, int], TrackedReal] = {}
    total = real_from_rational(0, wp)
    for key, coeff in cf:
        term = real_from_rational(coeff, wp)
        for idx, exp in enumerate(key):
            if exp:
                if (idx, exp) not in powers:
                    powers[(idx, exp)] = base[idx] ** exp
                term = term * powers[(idx, exp)]
        total = total + term
    return total.round_to(prec)


# -- quarter-integer Gamma -----------------------------------------------------

_GAMMA_THREE_QUARTERS = PI * SQRT2 / G


def _require_odd(n: int) -> None:
    if not isinstance(n, int) or n % 2 == 0:
        raise UsageError(f"argument must be an odd integer, got {n!r}")


def gamma_quarter_cf(n: int) -> ClosedForm:
    """Gamma(n/4) for odd n, using Gamma(u) = Gamma(u + 1)/u for negative n."""
    _require_odd(n)
    if n < 0:
        return gamma_quarter_cf(n + 4) * Fraction(4, n)
    m, rem = divmod(n, 4)
    prod = 1
    if rem == 1:
        for j in range(1, m + 1):
            prod *= 4 * j - 3
        return G * Fraction(prod, 4**m)
    for j in range(1, m + 1):
        prod *= 4 * j - 1
    return _GAMMA_THREE_QUARTERS * Fraction(prod, 4**m)


def gprod(f: Callable[[int], int], upper: int) -> Fraction:
    """prod_{j=1}^{upper} f(j), extended to negative ``upper``.

    The extension keeps prod_{1}^{n} = f(n) * prod_{1}^{n-1} valid for every
    integer n, so prod_{1}^{0} = 1 and prod_{1}^{-n} = 1 / prod_{j=-n+1}^{0} f(j).
    """
    out = Fraction(1)
    if upper >= 0:
        for j in range(1, upper + 1):
            out *= f(j)
    else:
        for j in range(upper + 1, 1):
            out /= f(j)
    return out


def _gamma_offset(m: int, quarter: int) -> ClosedForm:
    """Gamma(m + quarter/4) for any integer m and quarter in {1, 3}."""
    if quarter == 1:
        return G * (gprod(lambda j: 4 * j - 3, m) / Fraction(4) ** m)
    return _GAMMA_THREE_QUARTERS * (gprod(lambda j: 4 * j - 1, m) / Fraction(4) ** m)


def gamma_ratio_cf(n: int) -> ClosedForm:
    """Gamma(3n/4) / Gamma(n/4)^3 for odd n, via quarter-offset products."""
    _require_odd(n)
    top_m, top_q = divmod(3 * n, 4)
    bot_m, bot_q = divmod(n, 4)
    return _gamma_offset(top_m, top_q) / _gamma_offset(bot_m, bot_q) ** 3


# -- trigonometric sign patterns at odd multiples of pi/4 ------------------------


def _neg1(e: int) -> int:
    """(-1)^e for any integer e, kept as an int."""
    return -1 if e % 2 else 1


def _ceil_half(m: int) -> int:
    return -((-m) // 2)


def sign_cos_plus(m: int) -> int:
    """sqrt(2) * cos(pi (2m + 1) / 4)."""
    return _neg1(_ceil_half(m))


def sign_sin_plus(m: int) -> int:
    """sqrt(2) * sin(pi (2m + 1) / 4)."""
    return _neg1(m + _ceil_half(m))


def sign_cos_minus(m: int) -> int:
    """sqrt(2) * cos(pi (2m - 1) / 4)."""
    return _neg1(m // 2)


def sign_sin_minus(m: int) -> int:
    """sqrt(2) * sin(pi (2m - 1) / 4)."""
    return -_neg1(_ceil_half(m))


# -- right-hand sides ------------------------------------------------------------


def _catalan_scale(m: int, power: int = 3) -> Fraction:
    """1 / (((m + 2)!)^power * C_{m+1}^power)."""
    return Fraction(1, (math.factorial(m + 2) * catalan(m + 1)) ** power)


def _central_scale(m: int) -> Fraction:
    """(m! binom(2m, m) / 2^m)^(-3)."""
    return Fraction(2**m, math.factorial(m) * central_binomial(m)) ** 3


def _cubed_catalan_head(m: int, stop: int, sign: bool, linear: Callable[[int], Fraction]) -> Fraction:
    total = Fraction(0)
    for k in range(stop):
        x = Fraction(catalan(k), 4**k) * odd_product(k, m)
        if sign and k % 2:
            x = -x
        total += x**3 * linear(k)
    return total


def _rhs_f1(m: int) -> ClosedForm:
    scale = _neg1(m) * 2 ** (3 * m + 6) * _catalan_scale(m)
    ratio = gamma_ratio_cf(2 * m + 1)
    inner = 1 - SQRT2 * ratio * Fraction(24 * sign_cos_plus(m), (2 * m + 1) ** 2)
    return inner * scale


def _rhs_f1a(m: int) -> ClosedForm:
    scale = Fraction(2 ** (6 * m + 6), (math.factorial(2 * m + 2) * catalan(2 * m + 1)) ** 3)
    prods = gprod(lambda j: 4 * j - 1, 3 * m) / gprod(lambda j: 4 * j - 3, m) ** 3
    inner = 1 - PI * G**-4 * (Fraction(48 * _neg1(m), (4 * m + 1) ** 2) * prods)
    return inner * scale


def _rhs_f1b(m: int) -> ClosedForm:
    scale = -Fraction(2 ** (6 * m + 3), (math.factorial(2 * m + 1) * catalan(2 * m)) ** 3)
    prods = gprod(lambda j: 4 * j - 3, 3 * m - 1) / gprod(lambda j: 4 * j - 1, m - 1) ** 3
    inner = 1 - PI**-3 * G**4 * (Fraction(3 * _neg1(m), 4 * (4 * m - 1) ** 2) * prods)
    return inner * scale


def _rhs_f2(m: int) -> ClosedForm:
    scale = _neg1(m) * 2 ** (3 * m + 6) * _catalan_scale(m)
    return (2 * m + 1 - PI**-1 * (2 * _neg1(m))) * scale


def _rhs_f3(m: int) -> ClosedForm:
    scale = _neg1(m - 1) * 2 ** (3 * m + 6) * _catalan_scale(m)
    coeff = Fraction(_neg1(m + _ceil_half(m)) * 24 * (6 * m + 1), (2 * m - 1) ** 2)
    return (2 * m + 1 - SQRT2 * gamma_ratio_cf(2 * m - 1) * coeff) * scale


def _rhs_f3a(m: int) -> ClosedForm:
    scale = -Fraction(2 ** (6 * m + 6), (math.factorial(2 * m + 2) * catalan(2 * m + 1)) ** 3)
    prods = gprod(lambda j: 4 * j - 3, 3 * m - 1) / gprod(lambda j: 4 * j - 1, m - 1) ** 3
    coeff = Fraction(3 * _neg1(m) * (12 * m + 1), 4 * (4 * m - 1) ** 2) * prods
    return (4 * m + 1 - PI**-3 * G**4 * coeff) * scale


def _rhs_f3b(m: int) -> ClosedForm:
    scale = Fraction(2 ** (6 * m + 3), (math.factorial(2 * m + 1) * catalan(2 * m)) ** 3)
    prods = gprod(lambda j: 4 * j - 1, 3 * m - 3) / gprod(lambda j: 4 * j - 3, m - 1) ** 3
    coeff = Fraction(48 * _neg1(m) * (12 * m - 5), (4 * m - 3) ** 2) * prods
    return (4 * m - 1 + PI * G**-4 * coeff) * scale


def _rhs_f4(m: int) -> ClosedForm:
    head = _cubed_catalan_head(m, m + 1, False, lambda k: odd_harmonic(m - k))
    o_next = odd_harmonic(m + 1)
    scale = _catalan_scale(m)
    first = _neg1(m) * 2 ** (3 * m + 6) * o_next * scale
    outer = _neg1(m + _ceil_half(m)) * 2 ** (3 * m + 7) * scale * Fraction(3, (2 * m + 1) ** 2)
    bracket = PI * Fraction(_neg1(m - 1), 3) + quarter_harmonic_diff(m) - 4 * o_next
    return -head + first + SQRT2 * gamma_ratio_cf(2 * m + 1) * bracket * outer


def _rhs_f5(m: int) -> ClosedForm:
    head = _cubed_catalan_head(
        m, m, True, lambda k: (4 * k - 2 * m + 3) * odd_harmonic(m - k) + Fraction(1, 3)
    )
    scale = _neg1(m) * 2 ** (3 * m + 6) * _catalan_scale(m)
    inner = (2 * m + 1 - PI**-1 * (2 * _neg1(m))) * odd_harmonic(m + 1) - Fraction(1, 3)
    return -head + inner * scale


def _fourth_head(m: int) -> Fraction:
    total = Fraction(0)
    for k in range(m):
        x = Fraction(catalan(k), 4**k) * odd_product(k, m)
        total += x**4 * ((4 * k - 2 * m + 3) * odd_harmonic(m - k) + Fraction(1, 4))
    return total


def _rhs_f6(m: int) -> ClosedForm:
    scale = 2 ** (4 * m + 8) * _catalan_scale(m, 4)
    coeff = Fraction(_neg1(m) * 2 ** (4 * m + 3), (m + 1) * (2 * m + 1) * catalan(m))
    return (2 * m + 1 - PI**-2 * coeff) * scale


def _rhs_f7(m: int) -> ClosedForm:
    scale = 2 ** (4 * m + 8) * _catalan_scale(m, 4)
    denom = (m + 1) * (2 * m + 1) * catalan(m)
    first = (2 * m + 1 + PI**-2 * Fraction(3 * _neg1(m + 1) * 2 ** (4 * m + 2), denom)) * (
        odd_harmonic(m + 1) * scale
    )
    log_part = 2 * LN2 + harmonic(2 * m + 1)
    second = (log_part * PI**-2 * Fraction(_neg1(m) * 2 ** (4 * m + 1), denom) - Fraction(1, 4)) * scale
    return -_fourth_head(m) + first + second


def _rhs_f8(m: int) -> ClosedForm:
    return PI**-1 * (2 * _central_scale(m))


def _rhs_f9(m: int) -> ClosedForm:
    head = Fraction(0)
    for k in range(m):
        x = (-1) ** k * Fraction(central_binomial(k), 4**k) * odd_product(k, m)
        head += x**3 * ((4 * k - 2 * m + 1) * odd_harmonic(m - k) + Fraction(1, 3))
    return -head + PI**-1 * (2 * _central_scale(m) * odd_harmonic(m))


def _rhs_f10(m: int) -> ClosedForm:
    coeff = Fraction(_neg1(m) * 2 ** (8 * m), math.factorial(m) ** 4 * m * central_binomial(m) ** 5)
    return PI**-2 * coeff


def _rhs_f11(m: int) -> ClosedForm:
    coeff = _central_scale(m) * Fraction(24 * sign_cos_plus(m), (2 * m - 1) ** 2)
    return SQRT2 * gamma_ratio_cf(2 * m - 1) * coeff


def _rhs_f11a(m: int) -> ClosedForm:
    scale = Fraction(4**m, math.factorial(2 * m) * central_binomial(2 * m)) ** 3
    top = 1
    for j in range(3 * m):
        top *= 4 * j - 3
    bottom = 1
    for j in range(m):
        bottom *= (4 * j - 1) ** 3
    coeff = scale * Fraction(_neg1(m), 4 * (4 * m - 1) ** 2) * Fraction(top, bottom)
    return G**4 * PI**-3 * coeff


def _rhs_f11b(m: int) -> ClosedForm:
    scale = Fraction(2 ** (2 * m + 1), math.factorial(2 * m + 1) * central_binomial(2 * m + 1)) ** 3
    prods = gprod(lambda j: 4 * j - 1, 3 * m) / gprod(lambda j: 4 * j - 3, m) ** 3
    coeff = scale * Fraction(48 * _neg1(m + 1), (4 * m + 1) ** 2) * prods
    return PI * G**-4 * coeff


_BUILDERS: dict[FamilyId, Callable[[int], ClosedForm]] = {
    FamilyId.F1: _rhs_f1,
    FamilyId.F1a: _rhs_f1a,
    FamilyId.F1b: _rhs_f1b,
    FamilyId.F2: _rhs_f2,
    FamilyId.F3: _rhs_f3,
    FamilyId.F3a: _rhs_f3a,
    FamilyId.F3b: _rhs_f3b,
    FamilyId.F4: _rhs_f4,
    FamilyId.F5: _rhs_f5,
    FamilyId.F6: _rhs_f6,
    FamilyId.F7: _rhs_f7,
    FamilyId.F8: _rhs_f8,
    FamilyId.F9: _rhs_f9,
    FamilyId.F10: _rhs_f10,
    FamilyId.F11: _rhs_f11,
    FamilyId.F11a: _rhs_f11a,
    FamilyId.F11b: _rhs_f11b,
}


def rhs(family: FamilyId | str, m: int) -> ClosedForm:
    """Exact closed-form value of the series ``family`` at parameter ``m``."""
    fam = FamilyId.parse(family)
    _check_m(fam, m)
    return _BUILDERS[fam](m)
