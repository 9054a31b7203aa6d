"""Integer-relation detection (PSLQ) and closed-form recognition.

:func:`pslq` is the classical one-level PSLQ iteration run in MPFR at the
requested precision. :func:`recognize` appends the target value to a list of
basis monomials and turns a relation into rational coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2
from gmpy2 import mpfr

from .closedforms import cf_eval
from .errors import PrecisionError, UsageError
from .forms import ClosedForm
from .precision import TrackedReal, _ctx, _UP, real_from_rational

__all__ = ["RelationResult", "pslq", "recognize", "recognize_sum", "detection_threshold"]

DEFAULT_COEFF_BOUND = 10**8
DEFAULT_DENOM_BOUND = 10**4
_GAMMA = math.sqrt(4 / 3) + 0.01


@dataclass(frozen=True)
class RelationResult:
    """Outcome of :func:`pslq`; ``coefficients`` is None when no relation was found."""

    coefficients: Optional[tuple[int, ...]]
    residual: Optional[TrackedReal]
    iterations: int

    @property
    def found(self) -> bool:
        return self.coefficients is not None


def detection_threshold(prec: int, scale=1) -> mpfr:
    """2^(-prec/2) relative to the largest input magnitude."""
    return _UP.mul(_UP.mul_2exp(mpfr(1), -(prec // 2)), _UP.abs(mpfr(scale)) if scale else mpfr(1))


def _nint(v: mpfr) -> int:
    return int(gmpy2.rint(v))


def _validate(xs: Sequence[TrackedReal], prec: int) -> None:
    if len(xs) < 2:
        raise UsageError("pslq needs at least two numbers")
    if prec < 64 * len(xs):
        raise PrecisionError(f"{len(xs)} inputs need at least {64 * len(xs)} bits, got {prec}")
    limit = _UP.mul_2exp(mpfr(1), -prec + 16)
    for i, x in enumerate(xs):
        if x.radius > limit:
            raise PrecisionError(
                f"input {i} has error radius {x.radius_str()}, above 2^-{prec - 16} required at {prec} bits"
            )


def pslq(
    xs: Sequence[TrackedReal],
    coeff_bound: int = DEFAULT_COEFF_BOUND,
    prec: Optional[int] = None,
    max_iterations: int = 20_000,
) -> RelationResult:
    """Find integers c (not all zero, max |c_i| <= coeff_bound) with sum c_i x_i ~ 0.

    A relation is reported only when the certified residual |sum c_i x_i|,
    computed in tracked arithmetic, is within 2^(-prec/2) * max|x_i|.
    """
    xs = [x if isinstance(x, TrackedReal) else real_from_rational(x, prec or 256) for x in xs]
    if prec is None:
        prec = min(x.prec for x in xs)
    _validate(xs, prec)
    n = len(xs)
    ctx = _ctx(prec)
    scale = max(_UP.abs(x.value) for x in xs)
    threshold = detection_threshold(prec, scale)

    # an exact zero input is its own relation
    for i, x in enumerate(xs):
        if gmpy2.is_zero(x.value) and x.radius == 0:
            coeffs = tuple(1 if j == i else 0 for j in range(n))
            return RelationResult(coeffs, _residual(xs, coeffs, prec), 0)

    x = [ctx.add(v.value, 0) for v in xs]
    # partial norms s_k = sqrt(sum_{j >= k} x_j^2), then normalize
    s = [mpfr(0)] * n
    acc = mpfr(0)
    for k in range(n - 1, -1, -1):
        acc = ctx.add(acc, ctx.mul(x[k], x[k]))
        s[k] = ctx.sqrt(acc)
    t = s[0]
    y = [ctx.div(v, t) for v in x]
    s = [ctx.div(v, t) for v in s]
    H = [[mpfr(0)] * (n - 1) for _ in range(n)]
    for i in range(n):
        for j in range(min(i + 1, n - 1)):
            if j == i:
                H[i][j] = ctx.div(s[i + 1], s[i])
            else:
                H[i][j] = ctx.minus(ctx.div(ctx.mul(y[i], y[j]), ctx.mul(s[j], s[j + 1])))
    A = [[int(i == j) for j in range(n)] for i in range(n)]
    B = [[int(i == j) for j in range(n)] for i in range(n)]

    def reduce_rows(rows, upto):
        for i in rows:
            for j in range(min(i - 1, upto), -1, -1):
                if gmpy2.is_zero(H[j][j]):
                    continue
                q = _nint(ctx.div(H[i][j], H[j][j]))
                if not q:
                    continue
                y[j] = ctx.add(y[j], ctx.mul(q, y[i]))
                for k in range(j + 1):
                    H[i][k] = ctx.sub(H[i][k], ctx.mul(q, H[j][k]))
                for k in range(n):
                    A[i][k] -= q * A[j][k]
                    B[k][j] += q * B[k][i]

    reduce_rows(range(1, n), n)
    gamma = mpfr(_GAMMA)
    tol = ctx.mul_2exp(mpfr(1), -(prec // 2))
    for iteration in range(1, max_iterations + 1):
        # pick the row with the largest weighted diagonal entry
        best_m, best_val = 0, mpfr(-1)
        power = mpfr(1)
        for i in range(n - 1):
            power = ctx.mul(power, gamma)
            val = ctx.mul(power, ctx.abs(H[i][i]))
            if val > best_val:
                best_m, best_val = i, val
        m = best_m
        y[m], y[m + 1] = y[m + 1], y[m]
        H[m], H[m + 1] = H[m + 1], H[m]
        A[m], A[m + 1] = A[m + 1], A[m]
        for row in B:
            row[m], row[m + 1] = row[m + 1], row[m]
        if m < n - 2:
            t0 = ctx.sqrt(ctx.add(ctx.mul(H[m][m], H[m][m]), ctx.mul(H[m][m + 1], H[m][m + 1])))
            if gmpy2.is_zero(t0):
                break
            t1 = ctx.div(H[m][m], t0)
            t2 = ctx.div(H[m][m + 1], t0)
            for i in range(m, n):
                t3, t4 = H[i][m], H[i][m + 1]
                H[i][m] = ctx.add(ctx.mul(t1, t3), ctx.mul(t2, t4))
                H[i][m + 1] = ctx.sub(ctx.mul(t1, t4), ctx.mul(t2, t3))
        reduce_rows(range(m + 1, n), m + 1)

        # a tiny entry of y marks a relation in the matching column of B
        for j in range(n):
            if ctx.abs(y[j]) < tol:
                coeffs = _normalize(tuple(B[i][j] for i in range(n)))
                if not any(coeffs) or max(abs(c) for c in coeffs) > coeff_bound:
                    return RelationResult(None, None, iteration)
                residual = _residual(xs, coeffs, prec)
                if residual.magnitude() <= threshold:
                    return RelationResult(coeffs, residual, iteration)
                return RelationResult(None, None, iteration)

        # any relation has norm at least 1 / max |H_jj|
        hmax = max(ctx.abs(H[i][i]) for i in range(n - 1))
        if gmpy2.is_zero(hmax):
            break
        if ctx.div(1, hmax) > coeff_bound * math.sqrt(n):
            return RelationResult(None, None, iteration)
    return RelationResult(None, None, max_iterations)


def _normalize(coeffs: tuple[int, ...]) -> tuple[int, ...]:
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    if g > 1:
        coeffs = tuple(c // g for c in coeffs)
    lead = next((c for c in coeffs if c), 0)
    return tuple(-c for c in coeffs) if lead < 0 else coeffs


def _residual(xs: Sequence[TrackedReal], coeffs: Sequence[int], prec: int) -> TrackedReal:
    total = real_from_rational(0, prec + 64)
    for c, x in zip(coeffs, xs):
        if c:
            total = total + x * c
    return abs(total)


def recognize(
    value: TrackedReal,
    basis: Sequence[ClosedForm],
    coeff_bound: int = DEFAULT_COEFF_BOUND,
    denom_bound: int = DEFAULT_DENOM_BOUND,
    prec: Optional[int] = None,
) -> Optional[ClosedForm]:
    """Express ``value`` as a rational combination of ``basis``, or return None.

    PSLQ runs on [value, b_1, ..., b_k]. A relation with a non-zero first
    coefficient c_0 (|c_0| <= denom_bound after removing common factors) gives
    value = -sum (c_i / c_0) b_i. The default precision is the minimum PSLQ
    accepts, 64 (k + 1) bits.
    """
    if not basis:
        raise UsageError("recognize needs a non-empty basis")
    if len(set(basis)) != len(basis):
        raise UsageError("basis elements must be pairwise distinct")
    if any(not b for b in basis):
        raise UsageError("basis elements must be non-zero")
    n = len(basis) + 1
    if prec is None:
        prec = 64 * n
    xs = [value] + [cf_eval(b, prec + 32) for b in basis]
    result = pslq(xs, coeff_bound, prec)
    if not result.found:
        return None
    c0, *rest = result.coefficients
    if c0 == 0 or abs(c0) > denom_bound:
        return None
    form = ClosedForm()
    for c, b in zip(rest, basis):
        if c:
            form = form + b * Fraction(-c, c0)
    check = cf_eval(form, prec + 32)
    if not value.overlaps(check, slack=detection_threshold(prec, value.magnitude())):
        return None
    return form


def recognize_sum(
    family,
    m: int,
    basis: Sequence[ClosedForm],
    coeff_bound: int = DEFAULT_COEFF_BOUND,
    denom_bound: int = DEFAULT_DENOM_BOUND,
    prec: Optional[int] = None,
) -> Optional[ClosedForm]:
    """Sum a family accurately enough for PSLQ, then :func:`recognize` it."""
    from .series import sum_series

    prec = max(prec or 0, 64 * (len(basis) + 1))
    total = sum_series(family, m, Fraction(1, 2 ** (prec - 12)), prec + 64).value
    return recognize(total, basis, coeff_bound, denom_bound, prec)
