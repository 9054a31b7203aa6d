"""Arbitrary-precision reals with a tracked absolute-error radius.

Values are MPFR floats (via gmpy2) rounded to nearest; every operation adds one
ulp-sized term to the radius on top of the propagated input radii, so the
radius is a conservative bound on ``|stored - true|``. Radii are computed in a
small upward-rounding context.

The module also owns the fundamental constants (pi, ln 2, sqrt 2, Gamma(1/4))
and a real-argument log-Gamma based on Stirling's series.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import DomainError, PrecisionError, UsageError

MIN_PREC = 64
DEFAULT_PREC = 256

_UP = gmpy2.context(precision=64, round=gmpy2.RoundUp)
_DOWN = gmpy2.context(precision=64, round=gmpy2.RoundDown)
_ZERO = mpfr(0)


@lru_cache(maxsize=None)
def _ctx(prec: int) -> gmpy2.context:
    # never mutated after creation, so sharing between threads is safe
    return gmpy2.context(precision=prec, round=gmpy2.RoundToNearest)


def _ulp_bound(v: mpfr, prec: int) -> mpfr:
    """Upper bound on one ulp of ``v``: |v| * 2**(1 - prec)."""
    if gmpy2.is_zero(v):
        return _ZERO
    return _UP.mul_2exp(_UP.abs(v), 1 - prec)


def _up(x) -> mpfr:
    """Non-negative bound ``x`` as a 64-bit float rounded upward."""
    if isinstance(x, mpfr):
        return _UP.abs(x)
    q = abs(_as_mpq(x))
    return _UP.div(mpz(q.numerator), mpz(q.denominator))


def _as_mpq(q) -> mpq:
    if isinstance(q, Fraction):
        return mpq(q.numerator, q.denominator)
    if isinstance(q, (int, mpz)):
        return mpq(q)
    if isinstance(q, mpq):
        return q
    if isinstance(q, Rational):
        return mpq(int(q.numerator), int(q.denominator))
    if isinstance(q, float):
        return mpq(*q.as_integer_ratio())
    if isinstance(q, str):
        return mpq(Fraction(q).numerator, Fraction(q).denominator)
    raise TypeError(f"cannot interpret {q!r} as a rational")


@dataclass(frozen=True, slots=True)
class TrackedReal:
    """An MPFR value together with a certified bound on its absolute error."""

    value: mpfr
    prec: int
    radius: mpfr = _ZERO

    # -- construction ------------------------------------------------------

    @classmethod
    def exact(cls, value, prec: int) -> "TrackedReal":
        """Wrap a rational; exact when representable, else correctly rounded."""
        return real_from_rational(value, prec)

    def _coerce(self, other) -> "TrackedReal":
        if isinstance(other, TrackedReal):
            return other
        return real_from_rational(other, self.prec)

    # -- interval helpers --------------------------------------------------

    @property
    def lower(self) -> mpfr:
        return _DOWN.sub(self.value, self.radius)

    @property
    def upper(self) -> mpfr:
        return _UP.add(self.value, self.radius)

    def magnitude(self) -> mpfr:
        """Upper bound on the absolute value of the true quantity."""
        return _UP.add(_UP.abs(self.value), self.radius)

    def contains(self, other) -> bool:
        """True when the (point) value of ``other`` lies inside this interval."""
        v = other.value if isinstance(other, TrackedReal) else _as_mpq(other)
        diff = _UP.abs(_ctx(max(self.prec, 64) + 64).sub(self.value, v))
        return diff <= self.radius

    def overlaps(self, other: "TrackedReal", slack=0) -> bool:
        """True when both intervals intersect (optionally widened by ``slack``)."""
        gap = _UP.abs(_ctx(max(self.prec, other.prec) + 64).sub(self.value, other.value))
        allowed = _UP.add(_UP.add(self.radius, other.radius), _up(slack))
        return gap <= allowed

    def with_radius(self, extra) -> "TrackedReal":
        return TrackedReal(self.value, self.prec, _UP.add(self.radius, _up(extra)))

    def round_to(self, prec: int) -> "TrackedReal":
        v = _ctx(prec).add(self.value, 0)
        extra = _ulp_bound(v, prec) if v != self.value else _ZERO
        return TrackedReal(v, prec, _UP.add(self.radius, extra))

    def is_positive(self) -> bool:
        return self.lower > 0

    def is_negative(self) -> bool:
        return self.upper < 0

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "TrackedReal":
        return TrackedReal(_ctx(self.prec).minus(self.value), self.prec, self.radius)

    def __abs__(self) -> "TrackedReal":
        return TrackedReal(_ctx(self.prec).abs(self.value), self.prec, self.radius)

    def __add__(self, other) -> "TrackedReal":
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        v = _ctx(p).add(self.value, o.value)
        r = _UP.add(_UP.add(self.radius, o.radius), _ulp_bound(v, p))
        return TrackedReal(v, p, r)

    __radd__ = __add__

    def __sub__(self, other) -> "TrackedReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TrackedReal":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TrackedReal":
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        v = _ctx(p).mul(self.value, o.value)
        r = _UP.add(_UP.mul(_UP.abs(self.value), o.radius), _UP.mul(_UP.abs(o.value), self.radius))
        r = _UP.add(r, _UP.mul(self.radius, o.radius))
        return TrackedReal(v, p, _UP.add(r, _ulp_bound(v, p)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TrackedReal":
        o = self._coerce(other)
        p = max(self.prec, o.prec)
        lo = _DOWN.sub(_DOWN.abs(o.value), o.radius)
        if lo <= 0:
            raise DomainError("division by an interval that contains zero")
        v = _ctx(p).div(self.value, o.value)
        num = _UP.add(_UP.mul(_UP.abs(self.value), o.radius), _UP.mul(_UP.abs(o.value), self.radius))
        r = _UP.div(num, _DOWN.mul(_DOWN.abs(o.value), lo))
        return TrackedReal(v, p, _UP.add(r, _ulp_bound(v, p)))

    def __rtruediv__(self, other) -> "TrackedReal":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "TrackedReal":
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return 1 / (self**-n)
        result = real_from_rational(1, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def sqrt(self) -> "TrackedReal":
        if self.value < 0:
            raise DomainError("square root of a negative number")
        p = self.prec
        v = _ctx(p).sqrt(self.value)
        lo = _DOWN.sub(self.value, self.radius)
        if lo > 0:
            r = _UP.div(self.radius, _DOWN.sqrt(lo))
        else:
            r = _UP.sqrt(_UP.add(self.value, self.radius))
        return TrackedReal(v, p, _UP.add(r, _ulp_bound(v, p)))

    def exp(self) -> "TrackedReal":
        p = self.prec
        v = _ctx(p).exp(self.value)
        r = _UP.mul(_UP.exp(self.value), _UP.expm1(self.radius))
        return TrackedReal(v, p, _UP.add(r, _ulp_bound(v, p)))

    def log(self) -> "TrackedReal":
        lo = _DOWN.sub(self.value, self.radius)
        if lo <= 0:
            raise DomainError("logarithm of a non-positive interval")
        p = self.prec
        v = _ctx(p).log(self.value)
        r = _UP.log1p(_UP.div(self.radius, lo))
        return TrackedReal(v, p, _UP.add(r, _ulp_bound(v, p)))

    def sin(self) -> "TrackedReal":
        p = self.prec
        v = _ctx(p).sin(self.value)
        return TrackedReal(v, p, _UP.add(self.radius, _UP.mul_2exp(mpfr(1), 1 - p)))

    def cos(self) -> "TrackedReal":
        p = self.prec
        v = _ctx(p).cos(self.value)
        return TrackedReal(v, p, _UP.add(self.radius, _UP.mul_2exp(mpfr(1), 1 - p)))

    # -- conversion --------------------------------------------------------

    def __float__(self) -> float:
        return float(self.value)

    def to_decimal(self, digits: int = 40) -> str:
        return format_mpfr(self.value, digits)

    def radius_str(self) -> str:
        return format_mpfr(self.radius, 3, round_up=True)

    def __repr__(self) -> str:
        return f"TrackedReal({self.to_decimal(30)} ± {self.radius_str()}, prec={self.prec})"


Number = Union[int, Fraction, TrackedReal]


def format_mpfr(x: mpfr, digits: int = 40, round_up: bool = False) -> str:
    """Scientific decimal string with ``digits`` significant digits."""
    if gmpy2.is_zero(x):
        return "0"
    if round_up:
        mant, exp, _ = _UP.abs(x).digits(10, digits)
        # widen the last digit so the decimal never understates a bound
        m = int(mant.lstrip("-")) + 1
        mant = str(m)
        if len(mant) > digits:
            mant, exp = mant[:digits], exp + 1
    else:
        mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    body = mant[0] + ("." + mant[1:] if len(mant) > 1 else "")
    return f"{sign}{body}e{exp - 1:+d}"


def parse_decimal(text: str, prec: int) -> mpfr:
    return mpfr(text, prec)


def real_from_rational(q, prec: int) -> TrackedReal:
    """Round an exact rational to ``prec`` bits with radius <= |q| * 2**(1 - prec)."""
    if prec < MIN_PREC:
        raise UsageError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    r = _as_mpq(q)
    v = _ctx(prec).div(mpz(r.numerator), mpz(r.denominator))
    exact = mpq(v) == r
    return TrackedReal(v, prec, _ZERO if exact else _ulp_bound(v, prec))


def agm(a: TrackedReal, b: TrackedReal) -> TrackedReal:
    """Arithmetic-geometric mean of two positive tracked reals."""
    if not (a.is_positive() and b.is_positive()):
        raise DomainError("agm requires strictly positive arguments")
    p = max(a.prec, b.prec)
    for _ in range(200):
        gap = _ctx(p).abs(_ctx(p).sub(a.value, b.value))
        if gap <= _UP.mul_2exp(_UP.abs(a.value), 4 - p):
            break
        a, b = (a + b) / 2, (a * b).sqrt()
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise PrecisionError("agm failed to converge")
    # the limit lies between the two final iterates
    mean = (a + b) / 2
    spread = _UP.mul_2exp(_UP.abs(_UP.sub(a.value, b.value)), -1)
    return mean.with_radius(_UP.add(spread, _UP.add(a.radius, b.radius)))


# -- constants -----------------------------------------------------------------

CONSTANT_NAMES = ("PI", "LN2", "SQRT2", "GAMMA_QUARTER")
_GUARD = 32


def _pow2(e: int) -> mpfr:
    return _UP.mul_2exp(mpfr(1), e)


def pi_agm(prec: int) -> TrackedReal:
    """pi by the Gauss-Legendre (Brent-Salamin) AGM iteration."""
    one = real_from_rational(1, prec)
    a = one
    b = (real_from_rational(Fraction(1, 2), prec)).sqrt()
    t = real_from_rational(Fraction(1, 4), prec)
    pw = 1
    n = 0
    while True:
        a_next = (a + b) / 2
        b = (a * b).sqrt()
        d = a - a_next
        t = t - d * d * pw
        a = a_next
        pw *= 2
        n += 1
        # log2 of pi^2 2^(n+4) exp(-pi 2^(n+1)) / agm^2 (agm(1, 1/sqrt 2) > 0.84)
        log2_trunc = 2 * math.log2(math.pi) + n + 3 - math.pi * 2 ** n * math.log2(math.e) + 0.51
        if log2_trunc < -prec - 8:
            break
    s = a + b
    val = s * s / (t * 4)
    return val.with_radius(_pow2(int(math.ceil(log2_trunc))))


def _atan_inv(n: int, prec: int) -> TrackedReal:
    """atan(1/n) from its alternating Taylor series, summed exactly."""
    total = Fraction(0)
    k = 0
    n2 = n * n
    denom = n
    while True:
        term = Fraction(1, (2 * k + 1) * denom)
        if term.denominator.bit_length() > prec + 16:
            break
        total += term if k % 2 == 0 else -term
        k += 1
        denom *= n2
    # alternating with decreasing terms: remainder below the first omitted term
    return real_from_rational(total, prec).with_radius(_up(term))


def pi_machin(prec: int) -> TrackedReal:
    """pi = 16 atan(1/5) - 4 atan(1/239)."""
    return _atan_inv(5, prec) * 16 - _atan_inv(239, prec) * 4


def _atanh_series(x: TrackedReal, prec: int) -> TrackedReal:
    """atanh(x) for 0 < x < 1/2 by the Taylor series with a geometric tail bound."""
    x2 = x * x
    power = x
    total = real_from_rational(0, prec)
    k = 0
    while True:
        term = power / (2 * k + 1)
        total = total + term
        k += 1
        power = power * x2
        if power.magnitude() < _pow2(-prec - 8):
            break
    tail = _UP.div(power.magnitude(), _DOWN.sub(mpfr(1), x2.magnitude()))
    return total.with_radius(tail)


def ln2_atanh(prec: int) -> TrackedReal:
    """ln 2 = 2 atanh(1/3), summed in exact rationals."""
    total = Fraction(0)
    k = 0
    while True:
        term = Fraction(1, (2 * k + 1) * 3 ** (2 * k + 1))
        total += term
        k += 1
        if term.denominator.bit_length() > prec + 16:
            break
    tail = Fraction(9, 8) * Fraction(1, (2 * k + 1) * 3 ** (2 * k + 1))
    return (real_from_rational(2 * total, prec)).with_radius(_up(2 * tail))


def ln2_halving(prec: int) -> TrackedReal:
    """ln 2 = 2 ln(sqrt 2), with ln(sqrt 2) = 2 atanh(3 - 2 sqrt 2)."""
    s = real_from_rational(2, prec).sqrt()
    return _atanh_series(3 - s * 2, prec) * 4


def gamma_quarter_agm(prec: int) -> TrackedReal:
    """Gamma(1/4) from Gamma(1/4)^2 = (2 pi)^(3/2) / agm(1, sqrt 2)."""
    pi = pi_agm(prec)
    two_pi = pi * 2
    m = agm(real_from_rational(1, prec), real_from_rational(2, prec).sqrt())
    return (two_pi * two_pi.sqrt() / m).sqrt()


class ConstantCache:
    """Initialize-once cache of constants keyed by (name, precision)."""

    def __init__(self):
        self._values: dict[tuple[str, int], TrackedReal] = {}
        self._lock = threading.Lock()

    def get(self, name: str, prec: int) -> TrackedReal:
        key = (name, prec)
        found = self._values.get(key)
        if found is not None:
            return found
        value = _compute_constant(name, prec)
        with self._lock:
            # first writer wins; later callers see the same immutable object
            return self._values.setdefault(key, value)

    def clear(self) -> None:
        with self._lock:
            self._values.clear()


def _cross_check(primary: TrackedReal, secondary: TrackedReal, prec: int, what: str) -> None:
    if not primary.overlaps(secondary, slack=_pow2(-prec + 8)):
        raise PrecisionError(f"{what}: independent evaluations disagree beyond 2^-{prec - 8}")


def _compute_constant(name: str, prec: int) -> TrackedReal:
    wp = prec + _GUARD
    if name == "PI":
        value = pi_agm(wp)
        _cross_check(value, pi_machin(wp), prec, "pi")
    elif name == "LN2":
        value = ln2_atanh(wp)
        _cross_check(value, ln2_halving(wp), prec, "ln 2")
    elif name == "SQRT2":
        value = real_from_rational(2, wp).sqrt()
    elif name == "GAMMA_QUARTER":
        value = gamma_quarter_agm(wp)
        check = log_gamma(Fraction(1, 4), prec).exp()
        _cross_check(value, check, prec, "Gamma(1/4)")
    else:
        raise UsageError(f"unknown constant {name!r}; expected one of {', '.join(CONSTANT_NAMES)}")
    return value.round_to(prec)


_CACHE = ConstantCache()


def constant(name: str, prec: int = DEFAULT_PREC) -> TrackedReal:
    """One of PI, LN2, SQRT2, GAMMA_QUARTER at ``prec`` bits (cached)."""
    if prec < MIN_PREC:
        raise UsageError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    if name not in CONSTANT_NAMES:
        raise UsageError(f"unknown constant {name!r}; expected one of {', '.join(CONSTANT_NAMES)}")
    return _CACHE.get(name, prec)


# -- log Gamma -----------------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1)]
_BERNOULLI_LOCK = threading.Lock()


def bernoulli(n: int) -> Fraction:
    """B_n with the B_1 = -1/2 convention."""
    if n >= len(_BERNOULLI):
        with _BERNOULLI_LOCK:
            while len(_BERNOULLI) <= n:
                j = len(_BERNOULLI)
                s = sum(math.comb(j + 1, i) * _BERNOULLI[i] for i in range(j))
                _BERNOULLI.append(-s / (j + 1))
    return _BERNOULLI[n]


def log_gamma(x, prec: int = DEFAULT_PREC) -> TrackedReal:
    """log Gamma(x) for real x > 0.

    The argument is promoted to z = x + n >= prec/4 + 10, Stirling's series is
    summed until its first omitted term (which bounds the remainder for real
    z > 0) drops below 2**(-wp - 8), and log of the rising product x (x+1) ...
    (x+n-1) is subtracted. Rational ``x`` keeps the series and the product
    exact until a single rounding each.
    """
    if prec < MIN_PREC:
        raise UsageError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    wp = prec + 24
    tracked = isinstance(x, TrackedReal)
    if tracked:
        if not x.is_positive():
            raise DomainError("log_gamma requires x > 0")
        x = x.round_to(max(x.prec, wp)) if x.prec < wp else x
        approx = float(x.value)
    else:
        x = Fraction(x) if not isinstance(x, Fraction) else x
        if x <= 0:
            raise DomainError("log_gamma requires x > 0")
        approx = float(x)
    z_min = prec / 4 + 10
    shift = max(0, math.ceil(z_min - approx))

    half_log_2pi = (constant("PI", wp) * 2).log() / 2
    if tracked:
        z = x + shift
        prod = real_from_rational(1, wp)
        for i in range(shift):
            prod = prod * (x + i)
        zinv = 1 / z
        zinv2 = zinv * zinv
        series = real_from_rational(0, wp)
        power = zinv
        k = 1
        while True:
            coeff = bernoulli(2 * k) / (2 * k * (2 * k - 1))
            series = series + power * coeff
            power = power * zinv2
            nxt = abs(bernoulli(2 * k + 2) / ((2 * k + 2) * (2 * k + 1)))
            bound = _UP.mul(_up(nxt), power.magnitude())
            if bound < _pow2(-wp - 8):
                break
            k += 1
        main = (z - Fraction(1, 2)) * z.log() - z + half_log_2pi + series
        result = main.with_radius(bound)
        if shift:
            result = result - prod.log()
    else:
        z = x + shift
        prod = Fraction(1)
        for i in range(shift):
            prod *= x + i
        series = Fraction(0)
        k = 1
        while True:
            series += bernoulli(2 * k) / (2 * k * (2 * k - 1) * z ** (2 * k - 1))
            nxt = abs(bernoulli(2 * k + 2) / ((2 * k + 2) * (2 * k + 1) * z ** (2 * k + 1)))
            if nxt == 0 or math.log2(nxt.numerator) - math.log2(nxt.denominator) < -wp - 8:
                break
            k += 1
        zr = real_from_rational(z, wp)
        main = (zr - Fraction(1, 2)) * zr.log() - zr + half_log_2pi + real_from_rational(series, wp)
        result = main.with_radius(nxt)
        if shift:
            result = result - real_from_rational(prod, wp).log()
    # keep the absolute error near 2**-prec even when |log Gamma| is large
    mag = _ctx(result.prec).abs(result.value)
    extra = max(0, int(gmpy2.get_exp(mag))) if not gmpy2.is_zero(mag) else 0
    return result.round_to(prec + extra)
