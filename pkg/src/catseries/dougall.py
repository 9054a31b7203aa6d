"""Spot checks of the cubed and fourth-power binomial sums at real x.

Four sums over the generalized binomial binom(x, k + 1), evaluated through
its falling product so that no Gamma poles appear on the left-hand side:

* ``D-alt-plain``   sum (-1)^k binom(x, k+1)^3
* ``D-linear``      sum binom(x, k+1)^3 (2k + 2 - x)
* ``D-alt-linear``  sum (-1)^k binom(x, k+1)^3 (2k + 2 - x)
* ``D-fourth``      sum binom(x, k+1)^4 (2k + 2 - x)
"""

from __future__ import annotations

import enum
import math
import warnings
from fractions import Fraction

from gmpy2 import mpfr, mpz

from .combinatorics import falling_binomial
from .errors import DomainError, UsageError
from .precision import DEFAULT_PREC, MIN_PREC, TrackedReal, _ctx, _UP, constant, log_gamma, real_from_rational
from .series import accelerate, richardson

__all__ = ["DougallVariant", "dougall_lhs", "dougall_rhs", "dougall_term", "VALIDATED_ALT_LINEAR"]

# the alternating linear sum is only validated on this closed interval
VALIDATED_ALT_LINEAR = (Fraction(1, 2), Fraction(3))


class DougallVariant(str, enum.Enum):
    ALT_PLAIN = "D-alt-plain"
    LINEAR = "D-linear"
    ALT_LINEAR = "D-alt-linear"
    FOURTH = "D-fourth"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text) -> "DougallVariant":
        if isinstance(text, DougallVariant):
            return text
        for member in cls:
            if member.value.lower() == str(text).strip().lower():
                return member
        raise UsageError(f"unknown binomial-sum variant {text!r}; expected one of {', '.join(v.value for v in cls)}")

    @property
    def power(self) -> int:
        return 4 if self is DougallVariant.FOURTH else 3

    @property
    def signed(self) -> bool:
        return self in (DougallVariant.ALT_PLAIN, DougallVariant.ALT_LINEAR)

    @property
    def linear(self) -> bool:
        return self is not DougallVariant.ALT_PLAIN


_LOWER = {
    DougallVariant.ALT_PLAIN: Fraction(-2, 3),
    DougallVariant.LINEAR: Fraction(-1, 3),
    DougallVariant.ALT_LINEAR: Fraction(-1, 3),
    DougallVariant.FOURTH: Fraction(-1, 2),
}


def _as_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def _check(variant: DougallVariant, x: Fraction) -> None:
    if x <= _LOWER[variant]:
        raise DomainError(f"{variant} requires x > {_LOWER[variant]}, got {x}")
    lo, hi = VALIDATED_ALT_LINEAR
    if variant is DougallVariant.ALT_LINEAR and not lo <= x <= hi:
        warnings.warn(f"{variant} at x = {x} lies outside the validated range [{lo}, {hi}]", stacklevel=3)


def dougall_term(variant, x, k: int) -> Fraction:
    """The exact k-th term of a binomial sum at rational x."""
    v = DougallVariant.parse(variant)
    x = _as_fraction(x)
    value = falling_binomial(x, k + 1) ** v.power
    if v.linear:
        value *= 2 * k + 2 - x
    return -value if v.signed and k % 2 else value


class _DougallStream:
    """Floating terms of a binomial sum; same interface as the family stream."""

    def __init__(self, variant: DougallVariant, x: Fraction, wp: int):
        self.variant = variant
        self.x = x
        self.wp = wp
        self.ctx = _ctx(wp)
        self.start = 0
        self.k = -1
        self._c = self.ctx.div(mpz(x.numerator), mpz(x.denominator))
        self._x = self._c
        self.total = mpfr(0)
        self._abs_terms = mpfr(0)
        self._abs_sums = mpfr(0)

    def __next__(self) -> mpfr:
        ctx = self.ctx
        if self.k >= 0:
            p, q = self.x.numerator, self.x.denominator
            k = self.k
            self._c = ctx.mul(self._c, ctx.div(mpz(p - (k + 1) * q), mpz(q * (k + 2))))
        self.k += 1
        k = self.k
        t = ctx.pow(self._c, self.variant.power)
        if self.variant.linear:
            t = ctx.mul(t, ctx.sub(2 * k + 2, self._x))
        if self.variant.signed and k % 2:
            t = ctx.minus(t)
        self.total = ctx.add(self.total, t)
        self._abs_terms = _UP.add(self._abs_terms, _UP.abs(t))
        self._abs_sums = _UP.add(self._abs_sums, _UP.abs(self.total))
        return t

    def advance_to(self, n: int) -> None:
        while self.k < n:
            next(self)

    def rounding_radius(self) -> mpfr:
        steps = max(self.k, 0)
        rel = _UP.mul_2exp(mpfr(10 * steps + 40), -self.wp)
        return _UP.add(_UP.mul(rel, self._abs_terms), _UP.mul_2exp(self._abs_sums, 1 - self.wp))


def dougall_lhs(variant, x, eps=Fraction(1, 10**15), prec: int = DEFAULT_PREC, max_terms: int = 200_000) -> TrackedReal:
    """Left-hand side summed to absolute accuracy ``eps``.

    Non-negative integer x gives a finite sum, evaluated exactly. Otherwise the
    terms eventually alternate (D-linear) or keep one sign (the others); the
    first case is accelerated, the second extrapolated in powers of 1/N.
    """
    v = DougallVariant.parse(variant)
    x = _as_fraction(x)
    _check(v, x)
    if prec < MIN_PREC:
        raise UsageError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    if x.denominator == 1 and x >= 0:
        total = sum((dougall_term(v, x, k) for k in range(int(x))), Fraction(0))
        return real_from_rational(total, prec)
    eps_q = Fraction(eps)
    if eps_q <= 0:
        raise UsageError("eps must be positive")
    eps_f = _UP.div(mpz(eps_q.numerator), mpz(eps_q.denominator))
    wp = prec + 128
    stream = _DougallStream(v, x, wp)
    what = f"{v} at x = {x}"
    # past k = ceil(x) the binomials alternate in sign and 2k + 2 - x > 0
    k0 = max(math.ceil(x), 0) + 2
    if v is DougallVariant.LINEAR:
        value, rounding, tail, _ = accelerate(stream, k0, eps_f, 2000, what)
    else:
        decay = (4 * x + 4) if v is DougallVariant.FOURTH else (3 * x + 3)
        if v.linear:
            decay -= 1
        ctx = _ctx(wp + 128)
        beta = ctx.sub(ctx.div(mpz(decay.numerator), mpz(decay.denominator)), 1)
        value, rounding, tail, _ = richardson(stream, beta, False, eps_f, max(64, 4 * k0), max_terms, what)
    result = TrackedReal(_ctx(prec).add(value, 0), prec, _UP.add(rounding, tail))
    return result.with_radius(_UP.mul_2exp(_UP.abs(result.value), 1 - prec))


def _gamma_ratio(top: Fraction, bottom: Fraction, power: int, prec: int) -> TrackedReal:
    """Gamma(top) / Gamma(bottom)^power for positive rationals."""
    if top <= 0 or bottom <= 0:
        raise DomainError("Gamma pole or negative argument on the right-hand side")
    return (log_gamma(top, prec) - log_gamma(bottom, prec) * power).exp()


def dougall_rhs(variant, x, prec: int = DEFAULT_PREC) -> TrackedReal:
    """Closed-form right-hand side at x, with Gamma factors via log_gamma.

    The alternating linear sum uses the reflection-reduced form
    -x + 2 sin(pi x / 2) Gamma((1 + 3x)/2) / Gamma((1 + x)/2)^3, which has no
    pole at odd integers x.
    """
    v = DougallVariant.parse(variant)
    x = _as_fraction(x)
    _check(v, x)
    wp = prec + 32
    pi = constant("PI", wp)
    xr = real_from_rational(x, wp)
    if v is DougallVariant.ALT_PLAIN:
        ratio = _gamma_ratio((3 * x + 2) / 2, (x + 2) / 2, 3, wp)
        out = 1 - ratio * (pi * real_from_rational(x / 2, wp)).cos()
    elif v is DougallVariant.LINEAR:
        out = xr - (pi * xr).sin() / pi
    elif v is DougallVariant.ALT_LINEAR:
        ratio = _gamma_ratio((1 + 3 * x) / 2, (1 + x) / 2, 3, wp)
        out = -xr + (pi * real_from_rational(x / 2, wp)).sin() * ratio * 2
    else:
        binom = _gamma_ratio(2 * x + 1, x + 1, 2, wp)
        out = xr - (pi * xr).sin() / pi * binom
    return out.round_to(prec)
