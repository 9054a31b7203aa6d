"""Term generation, partial sums, tail bounds and summation of every family.

Exact terms come from :func:`term` and :func:`partial_sum`. Long sums go
through a floating term stream: the ratio X_{k+1}/X_k of the base quantity is
a ratio of two small integers, so each step costs one correctly rounded
division and one multiplication, and the relative error of term k grows at
most linearly in k. That bound is folded into every reported radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .closedforms import FamilyId, min_m, rhs
from .combinatorics import catalan, central_binomial, odd_harmonic, odd_product
from .errors import ConvergenceError, StrategyError, UsageError
from .forms import ClosedForm
from .precision import (
    DEFAULT_PREC,
    MIN_PREC,
    TrackedReal,
    _ctx,
    _DOWN,
    _UP,
    _up,
)

__all__ = [
    "FamilyDescriptor",
    "SumResult",
    "STRATEGIES",
    "descriptor",
    "FAMILIES",
    "term",
    "partial_sum",
    "tail_bound",
    "sum_series",
    "TermStream",
    "richardson",
    "accelerate",
    "chebyshev_sum",
]

STRATEGIES = ("direct", "alternating-accel", "monotone-extrapolation")
POSITIVE_TAIL = "positive-tail"
ALTERNATING = "alternating"

DEFAULT_MAX_TERMS = 200_000
DEFAULT_MAX_ACCEL = 2000
# direct summation is preferred while the predicted cut-off stays below this
DIRECT_LIMIT = 20_000
# a tail bound is only offered when the fitted exponent (after its margin) beats this
TAIL_EXPONENT_FLOOR = Fraction(9, 4)
_MARGIN = 0.25
_SAFETY = 2


@dataclass(frozen=True)
class FamilyDescriptor:
    """Shape of one family: t(m, k) = s_k * (base_k * P_n(k))^power * factor_k.

    ``base_k`` is C_k/4^k (``catalan=True``) or binom(2k, k)/4^k, P_n is the
    odd product of length n = ``inner(m)``, s_k = (-1)^k for alternating
    families, and ``factor_k`` is the linear polynomial, the odd harmonic
    O_{k-m}, or ``linear * O_{k-m} + offset``.
    """

    id: FamilyId
    catalan: bool
    power: int
    alternating: bool
    inner: Callable[[int], int]
    alpha: Callable[[int], Fraction]
    linear: Optional[Callable[[int], tuple[int, int]]] = None
    harmonic: bool = False
    offset: Fraction = Fraction(0)
    first_m: int = 0
    description: str = field(default="", compare=False)

    @property
    def sign_class(self) -> str:
        return ALTERNATING if self.alternating else POSITIVE_TAIL

    @property
    def has_log_factor(self) -> bool:
        return self.harmonic

    def start_index(self, m: int) -> int:
        return m if self.harmonic else 0

    def decay_exponent(self, m: int) -> Fraction:
        return self.alpha(m)

    def check_m(self, m: int) -> None:
        if not isinstance(m, int) or isinstance(m, bool):
            raise UsageError(f"m must be an integer, got {m!r}")
        if m < self.first_m:
            raise UsageError(f"{self.id} requires m >= {self.first_m}, got m = {m}")

    def linear_at(self, m: int, k: int) -> int:
        c1, c0 = self.linear(m)
        return c1 * k + c0

    def term(self, m: int, k: int) -> Fraction:
        return term(self.id, m, k)

    def rhs(self, m: int) -> ClosedForm:
        return rhs(self.id, m)

    def convergence_class(self, m: int) -> str:
        """'accelerated', 'fast' or 'slow-monotone'."""
        if self.alternating:
            return "accelerated"
        return "fast" if self.alpha(m) >= Fraction(5, 2) else "slow-monotone"


def _lin(c0_of_m: Callable[[int], int], c1: int = 4) -> Callable[[int], tuple[int, int]]:
    return lambda m: (c1, c0_of_m(m))


def _alpha(base: str, slope: int) -> Callable[[int], Fraction]:
    b = Fraction(base)
    return lambda m: b + slope * m


_D = FamilyDescriptor
FAMILIES: dict[FamilyId, FamilyDescriptor] = {
    d.id: d
    for d in (
        _D(FamilyId.F1, True, 3, False, lambda m: m, _alpha("9/2", 3)),
        _D(FamilyId.F1a, True, 3, False, lambda m: 2 * m, _alpha("9/2", 6)),
        _D(FamilyId.F1b, True, 3, False, lambda m: 2 * m - 1, _alpha("3/2", 6), first_m=1),
        _D(FamilyId.F2, True, 3, True, lambda m: m, _alpha("7/2", 3), _lin(lambda m: 3 - 2 * m)),
        _D(FamilyId.F3, True, 3, False, lambda m: m, _alpha("7/2", 3), _lin(lambda m: 3 - 2 * m)),
        _D(FamilyId.F3a, True, 3, False, lambda m: 2 * m, _alpha("7/2", 6), _lin(lambda m: 3 - 4 * m)),
        _D(
            FamilyId.F3b, True, 3, False, lambda m: 2 * m - 1, _alpha("1/2", 6),
            _lin(lambda m: 5 - 4 * m), first_m=1,
        ),
        _D(FamilyId.F4, True, 3, False, lambda m: m, _alpha("9/2", 3), harmonic=True),
        _D(
            FamilyId.F5, True, 3, True, lambda m: m, _alpha("7/2", 3), _lin(lambda m: 3 - 2 * m),
            harmonic=True, offset=Fraction(1, 3),
        ),
        _D(FamilyId.F6, True, 4, False, lambda m: m, _alpha("5", 4), _lin(lambda m: 3 - 2 * m)),
        _D(
            FamilyId.F7, True, 4, False, lambda m: m, _alpha("5", 4), _lin(lambda m: 3 - 2 * m),
            harmonic=True, offset=Fraction(1, 4),
        ),
        _D(FamilyId.F8, False, 3, True, lambda m: m, _alpha("1/2", 3), _lin(lambda m: 1 - 2 * m)),
        _D(
            FamilyId.F9, False, 3, True, lambda m: m, _alpha("1/2", 3), _lin(lambda m: 1 - 2 * m),
            harmonic=True, offset=Fraction(1, 3),
        ),
        _D(
            FamilyId.F10, False, 4, False, lambda m: m, _alpha("1", 4), _lin(lambda m: 1 - 2 * m),
            first_m=1,
        ),
        _D(FamilyId.F11, False, 3, False, lambda m: m, _alpha("3/2", 3)),
        _D(FamilyId.F11a, False, 3, False, lambda m: 2 * m, _alpha("3/2", 6)),
        _D(FamilyId.F11b, False, 3, False, lambda m: 2 * m + 1, _alpha("9/2", 6)),
    )
}
del _D

for _fid, _desc in FAMILIES.items():
    assert _desc.first_m == min_m(_fid), _fid


def descriptor(family: FamilyId | str) -> FamilyDescriptor:
    return FAMILIES[FamilyId.parse(family)]


def _resolve(family, m: int) -> FamilyDescriptor:
    desc = descriptor(family)
    desc.check_m(m)
    return desc


# -- exact terms -------------------------------------------------------------------


def _base(desc: FamilyDescriptor, m: int, k: int) -> Fraction:
    top = catalan(k) if desc.catalan else central_binomial(k)
    return Fraction(top, 4**k) * odd_product(k, desc.inner(m))


def _factor(desc: FamilyDescriptor, m: int, k: int) -> Fraction:
    if desc.harmonic:
        o = odd_harmonic(k - m)
        if desc.linear is None:
            return o
        return desc.linear_at(m, k) * o + desc.offset
    if desc.linear is None:
        return Fraction(1)
    return Fraction(desc.linear_at(m, k))


def term(family: FamilyId | str, m: int, k: int) -> Fraction:
    """The exact k-th term of ``family`` at parameter ``m``."""
    desc = _resolve(family, m)
    if not isinstance(k, int) or k < desc.start_index(m):
        raise UsageError(f"{desc.id} at m = {m} starts at k = {desc.start_index(m)}, got k = {k}")
    value = _base(desc, m, k) ** desc.power * _factor(desc, m, k)
    return -value if desc.alternating and k % 2 else value


def _ratio(desc: FamilyDescriptor, m: int, k: int) -> tuple[int, int]:
    """(num, den) with base_{k+1} P_n(k+1) = base_k P_n(k) * num/den, sign included."""
    n = desc.inner(m)
    num = 2 * k - 2 * n + 1
    den = 2 * (k + 2) if desc.catalan else 2 * (k + 1)
    if desc.alternating:
        num = -num
    return num, den


def partial_sum(family: FamilyId | str, m: int, N: int) -> Fraction:
    """Exact sum of the terms with start_index(m) <= k <= N."""
    desc = _resolve(family, m)
    start = desc.start_index(m)
    if N < start:
        raise UsageError(f"N must be at least {start}, got {N}")
    x0 = _base(desc, m, start)
    if desc.alternating and start % 2:
        x0 = -x0
    x = mpq(x0.numerator, x0.denominator)
    o = mpq(0)
    total = mpq(0)
    p = desc.power
    for k in range(start, N + 1):
        if k > start:
            num, den = _ratio(desc, m, k - 1)
            x = x * mpq(num, den)
            if desc.harmonic:
                o += mpq(1, 2 * (k - m) - 1)
        if desc.harmonic:
            f = o if desc.linear is None else desc.linear_at(m, k) * o + mpq(desc.offset.numerator, desc.offset.denominator)
        elif desc.linear is not None:
            f = desc.linear_at(m, k)
        else:
            f = 1
        total += x**p * f
    return Fraction(int(total.numerator), int(total.denominator))


# -- floating term stream -----------------------------------------------------------


class TermStream:
    """Floating terms t_k at ``wp`` bits, with running partial sums.

    After consuming terms up to index k, :meth:`rounding_radius` bounds the
    accumulated error of the running sum, including the drift of the ratio
    recurrence (at most 2 roundings per step), the odd-harmonic accumulator
    and the summation itself.
    """

    def __init__(self, desc: FamilyDescriptor, m: int, wp: int):
        self.desc = desc
        self.m = m
        self.wp = wp
        self.ctx = _ctx(wp)
        self.start = desc.start_index(m)
        self.k = self.start - 1
        x0 = _base(desc, m, self.start)
        if desc.alternating and self.start % 2:
            x0 = -x0
        y0 = x0**desc.power
        self._y = self.ctx.div(mpz(y0.numerator), mpz(y0.denominator))
        self._o = mpfr(0)
        self._offset = self.ctx.div(mpz(desc.offset.numerator), mpz(desc.offset.denominator))
        self.total = mpfr(0)
        self._abs_terms = mpfr(0)
        self._abs_sums = mpfr(0)
        self.last = mpfr(0)

    def __iter__(self):
        return self

    def __next__(self) -> mpfr:
        ctx = self.ctx
        desc = self.desc
        if self.k >= self.start:
            num, den = _ratio(desc, self.m, self.k)
            p = desc.power
            self._y = ctx.mul(self._y, ctx.div(mpz(num) ** p, mpz(den) ** p))
        self.k += 1
        k = self.k
        if desc.harmonic:
            j = k - self.m
            if j > 0:
                self._o = ctx.add(self._o, ctx.div(1, 2 * j - 1))
            if desc.linear is None:
                t = ctx.mul(self._y, self._o)
            else:
                f = ctx.add(ctx.mul(self._o, desc.linear_at(self.m, k)), self._offset)
                t = ctx.mul(self._y, f)
        elif desc.linear is not None:
            t = ctx.mul(self._y, desc.linear_at(self.m, k))
        else:
            t = self._y
        self.total = ctx.add(self.total, t)
        self._abs_terms = _UP.add(self._abs_terms, _UP.abs(t))
        self._abs_sums = _UP.add(self._abs_sums, _UP.abs(self.total))
        self.last = t
        return t

    def advance_to(self, n: int) -> None:
        while self.k < n:
            next(self)

    def rounding_radius(self) -> mpfr:
        """Bound on |running total - exact partial sum| for the terms consumed so far."""
        steps = max(self.k - self.start, 0)
        # relative error of one term: 2 roundings per ratio step, 2 per harmonic
        # step, a handful for the final assembly; doubled for second-order terms
        rel = _UP.mul_2exp(mpfr(8 * steps + 32), -self.wp)
        term_part = _UP.mul(rel, self._abs_terms)
        sum_part = _UP.mul_2exp(self._abs_sums, 1 - self.wp)
        return _UP.add(term_part, sum_part)

    def partial(self, prec: int) -> TrackedReal:
        """The running sum as a TrackedReal (rounding error only)."""
        return TrackedReal(self.total, self.wp, self.rounding_radius()).round_to(prec)


# -- tail bounds ------------------------------------------------------------------------


def _fit_exponent(samples: list[tuple[int, float]]) -> float:
    """Least-squares slope of log|t_k| against log k, returned as a positive decay rate."""
    xs = [math.log(k) for k, _ in samples]
    ys = [v for _, v in samples]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return -sxy / sxx


def _log_abs(v: mpfr) -> float:
    if gmpy2.is_zero(v):
        return -math.inf
    exp, mant = gmpy2.frexp(v)
    return math.log(abs(float(mant))) + exp * math.log(2)


def _tail_from_logs(desc: FamilyDescriptor, N: int, logs: dict[int, float], last: mpfr) -> mpfr:
    window = [(k, v) for k, v in logs.items() if N // 4 <= k <= N and math.isfinite(v)]
    if len(window) < 8:
        raise StrategyError("too few terms to estimate the decay exponent")
    alpha_hat = _fit_exponent(window) - _MARGIN
    if alpha_hat <= float(TAIL_EXPONENT_FLOOR):
        raise StrategyError(
            f"{desc.id}: fitted decay exponent {alpha_hat + _MARGIN:.3f} is too small for an "
            "integral tail bound; use monotone extrapolation"
        )
    bound = _UP.mul(_UP.abs(last), _UP.div(mpfr(N * _SAFETY), _DOWN.sub(mpfr(alpha_hat), 1)))
    if desc.has_log_factor:
        bound = _UP.mul(bound, _UP.add(mpfr(1), _UP.log(mpfr(N))))
    return bound


def _sample_logs(stream: TermStream, N: int, logs: dict[int, float]) -> None:
    """Advance ``stream`` to N, recording log|t_k| on a log-spaced grid of k."""
    marks = set()
    lo = max(N // 4, stream.start + 1)
    if N > lo:
        for i in range(65):
            marks.add(lo + round((N - lo) * i / 64))
    while stream.k < N:
        t = next(stream)
        if stream.k in marks:
            logs[stream.k] = _log_abs(t)


def tail_bound(family: FamilyId | str, m: int, N: int, prec: int = DEFAULT_PREC) -> TrackedReal:
    """Upper bound on sum_{k > N} |t_k| for a positive-tail family.

    B = |t_N| * N / (a - 1) * 2, where a is the least-squares decay exponent of
    t_{N/4} .. t_N minus a 0.25 margin; families with an odd-harmonic factor
    get an extra (1 + ln N). Raises StrategyError when a - 1 <= 1.25 (the tail
    decays too slowly for the bound to be trusted) or for alternating families.
    """
    desc = _resolve(family, m)
    if desc.alternating:
        raise StrategyError(f"{desc.id} is alternating; tail bounds apply to positive-tail families")
    start = desc.start_index(m)
    if N < 4 * start + 64:
        raise UsageError(f"tail_bound needs N >= 4*start + 64 = {4 * start + 64}, got {N}")
    stream = TermStream(desc, m, prec + 32)
    logs: dict[int, float] = {}
    _sample_logs(stream, N, logs)
    bound = _tail_from_logs(desc, N, logs, stream.last)
    return TrackedReal(_ctx(prec).add(bound, 0), prec, _UP.mul_2exp(bound, 1 - prec))


# -- results -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SumResult:
    """A summed series: ``value`` already includes ``tail_bound`` in its radius."""

    value: TrackedReal
    terms_used: int
    strategy: str
    tail_bound: TrackedReal


def _result(value: mpfr, rounding: mpfr, tail: mpfr, prec: int, terms: int, strategy: str) -> SumResult:
    total = TrackedReal(_ctx(prec).add(value, 0), prec, _UP.add(rounding, tail))
    total = total.with_radius(_UP.mul_2exp(_UP.abs(total.value), 1 - prec))
    return SumResult(total, terms, strategy, TrackedReal(_UP.add(tail, 0), 64, mpfr(0)))


# -- strategies ------------------------------------------------------------------------------


def _direct_positive(desc, m, eps, prec, max_terms, stream, logs, checkpoint):
    """Sum until tail + rounding <= eps; returns SumResult or None when hopeless."""
    N = checkpoint
    while True:
        _sample_logs(stream, N, logs)
        tail = _tail_from_logs(desc, N, logs, stream.last)
        rounding = stream.rounding_radius()
        if _UP.add(tail, rounding) <= eps:
            return _result(stream.total, rounding, tail, prec, N - stream.start + 1, "direct")
        # predict the cut-off from the local decay and give up early if it is far away
        window = [(k, v) for k, v in logs.items() if N // 4 <= k <= N]
        decay = max(_fit_exponent(window) - _MARGIN - 1, 0.05)
        ratio = float(tail) / float(eps)
        predicted = N * ratio ** (1 / decay) if ratio > 1 else N
        if predicted > min(max_terms, DIRECT_LIMIT) or 2 * N > max_terms:
            return None
        N *= 2


def _direct_alternating(desc, m, N, prec, wp):
    stream = TermStream(desc, m, wp)
    stream.advance_to(N)
    rounding = stream.rounding_radius()
    nxt = next(stream)
    # past the head the magnitudes decrease, so the next term bounds the remainder
    tail = _UP.abs(nxt)
    total = _ctx(wp).sub(stream.total, nxt)
    return _result(total, rounding, tail, prec, N - stream.start + 1, "direct")


def chebyshev_sum(a: list[mpfr], n: int, ctx) -> mpfr:
    """Chebyshev-weighted acceleration of sum (-1)^i a_i using a_0..a_{n-1}; error ~ (3 + sqrt 8)^-n."""
    root = ctx.sqrt(8)
    d = ctx.pow(ctx.add(3, root), n)
    d = ctx.div(ctx.add(d, ctx.div(1, d)), 2)
    b = mpfr(-1)
    c = ctx.minus(d)
    s = mpfr(0)
    for k in range(n):
        c = ctx.sub(b, c)
        s = ctx.add(s, ctx.mul(c, a[k]))
        b = ctx.div(ctx.mul(b, (k + n) * (k - n)), mpq(2 * k + 1, 2) * (k + 1))
    return ctx.div(s, d)


def _up_sum(values) -> mpfr:
    total = mpfr(0)
    for v in values:
        total = _UP.add(total, _UP.abs(v))
    return total


def accelerate(stream, k0: int, eps: mpfr, max_accel: int, what: str):
    """Sum the terms of ``stream`` exactly up to k0 - 1, then accelerate the rest.

    From k0 on the terms must alternate in sign; the magnitudes are fed to
    :func:`chebyshev_sum`. The truncation estimate is the larger of the model bound
    2 a_0 (3 + sqrt 8)^(-n) and the change from order 4n/5 to n. Returns
    ``(value, rounding, truncation, terms_used)``.
    """
    ctx = stream.ctx
    wp = stream.wp
    stream.advance_to(k0 - 1)
    head = stream.total
    head_rounding = stream.rounding_radius()
    mags: list[mpfr] = []
    sign = None

    def extend(count: int) -> None:
        nonlocal sign
        while len(mags) < count:
            t = next(stream)
            s = t > 0
            if sign is not None and s == sign:
                raise StrategyError(f"{what}: terms stop alternating at k = {stream.k}")
            sign = s
            mags.append(ctx.abs(t))

    extend(1)
    positive_first = sign
    if gmpy2.is_zero(mags[0]):
        return head, head_rounding, mpfr(0), k0 - stream.start
    lead = float(mags[0])
    rate = math.log(3 + math.sqrt(8))
    n = max(8, math.ceil(math.log(max(3 * lead / float(eps), 2)) / rate) + 4)
    best = None
    while True:
        if n > max_accel:
            raise ConvergenceError(
                f"{what}: acceleration did not reach {float(eps):.3g} within {max_accel} terms", best=best
            )
        extend(n)
        full = chebyshev_sum(mags, n, ctx)
        coarse = chebyshev_sum(mags, max(4, (4 * n) // 5), ctx)
        model = _UP.mul(_UP.mul_2exp(_up(mags[0]), 1), _UP.exp(mpfr(-n * rate + 1e-9)))
        change = _UP.abs(ctx.sub(full, coarse))
        tail = max(model, change)
        # each weight carries O(n) roundings, each magnitude O(k) from the stream
        rel = _UP.mul_2exp(mpfr(8 * (n + stream.k) + 64), -wp)
        rounding = _UP.add(head_rounding, _UP.mul(rel, _up_sum(mags[:n])))
        value = ctx.add(head, full if positive_first else ctx.minus(full))
        best = (value, rounding, tail, k0 - stream.start + n)
        if _UP.add(tail, rounding) <= eps:
            return best
        n = math.ceil(n * 1.5)


def _accelerated(desc, m, eps, prec, wp, max_accel):
    stream = TermStream(desc, m, wp)
    what = f"{desc.id} at m = {m}"
    # past k = start + n the odd product and linear factor are positive
    k0 = stream.start + desc.inner(m) + 2

    def package(found):
        value, rounding, tail, used = found
        return _result(value, rounding, tail, prec, used, "alternating-accel")

    try:
        found = accelerate(stream, k0, eps, max_accel, what)
    except ConvergenceError as exc:
        raise ConvergenceError(str(exc), best=package(exc.best) if exc.best else None) from None
    return package(found)


def _basis(beta: float, count: int, logs: bool) -> list[tuple[int, bool]]:
    out = []
    j = 0
    while len(out) < count:
        out.append((j, False))
        if logs and len(out) < count:
            out.append((j, True))
        j += 1
    return out


def _solve_weights(points: list[int], beta: mpfr, logs: bool, ctx) -> list[mpfr]:
    """Weights w with sum_i w_i phi(N_i) = [phi == 1] for the first len(points) basis functions."""
    n = len(points)
    basis = _basis(0, n - 1, logs)
    # matrix M[j][i] = phi_j(N_i); solve M w = e_0 by Gaussian elimination
    rows = []
    lns = [ctx.log(N) for N in points]
    rows.append([mpfr(1)] * n)
    for j, with_log in basis:
        row = []
        for N, ln in zip(points, lns):
            v = ctx.exp(ctx.mul(ctx.minus(ctx.add(beta, j)), ln))
            row.append(ctx.mul(v, ln) if with_log else v)
        rows.append(row)
    rhs_vec = [mpfr(1)] + [mpfr(0)] * (n - 1)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(rows[r][col]))
        rows[col], rows[piv] = rows[piv], rows[col]
        rhs_vec[col], rhs_vec[piv] = rhs_vec[piv], rhs_vec[col]
        p = rows[col][col]
        for r in range(col + 1, n):
            f = ctx.div(rows[r][col], p)
            if f:
                rows[r] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(rows[r], rows[col])]
                rhs_vec[r] = ctx.sub(rhs_vec[r], ctx.mul(f, rhs_vec[col]))
    w = [mpfr(0)] * n
    for r in range(n - 1, -1, -1):
        acc = rhs_vec[r]
        for c in range(r + 1, n):
            acc = ctx.sub(acc, ctx.mul(rows[r][c], w[c]))
        w[r] = ctx.div(acc, rows[r][r])
    return w


def _sample_points(first: int, last: int, ratio: float) -> list[int]:
    pts = []
    x = float(first)
    while round(x) <= last:
        n = int(round(x))
        if not pts or n > pts[-1]:
            pts.append(n)
        x *= ratio
    return pts


def richardson(stream, beta: mpfr, logs: bool, eps: mpfr, first: int, max_terms: int, what: str):
    """Extrapolate the partial sums of ``stream`` to their limit.

    The remainder is modelled as sum_j c_j N^(-beta-j) (plus c'_j N^(-beta-j) ln N
    when ``logs``). Orders are fitted on the largest sample points; the reported
    error is twice the larger of the two neighbouring order-to-order changes
    plus the propagated rounding noise. ``stream`` needs ``k``, ``start``,
    ``wp``, ``total``, ``advance_to`` and ``rounding_radius``. Returns
    ``(value, noise, truncation, last_index)``.
    """
    ctx = _ctx(stream.wp + 128)
    # finer sampling buys more extrapolation orders when the target is tight
    ratio = 2 ** 0.2 if float(eps) < 1e-40 else 2 ** 0.5
    last = max(2048, 8 * first)
    sums: dict[int, tuple[mpfr, mpfr]] = {}
    best = None
    while True:
        if last > max_terms:
            raise ConvergenceError(
                f"{what}: extrapolation did not reach {float(eps):.3g} within {max_terms} terms", best=best
            )
        points = _sample_points(first, last, ratio)
        for N in points:
            if N not in sums:
                stream.advance_to(N)
                sums[N] = (stream.total, stream.rounding_radius())
        estimates = []
        for order in range(1, min(len(points) - 1, 48) + 1):
            pts = points[-(order + 1):]
            w = _solve_weights(pts, beta, logs, ctx)
            value = mpfr(0)
            noise = mpfr(0)
            for wi, N in zip(w, pts):
                s, r = sums[N]
                value = ctx.add(value, ctx.mul(wi, s))
                noise = _UP.add(noise, _UP.mul(_UP.abs(wi), r))
            estimates.append((value, noise))
        choice = None
        for i in range(1, len(estimates)):
            diff = _UP.abs(ctx.sub(estimates[i][0], estimates[i - 1][0]))
            if i + 1 < len(estimates):
                diff = max(diff, _UP.abs(ctx.sub(estimates[i + 1][0], estimates[i][0])))
            trunc = _UP.mul_2exp(diff, 1)
            err = _UP.add(trunc, estimates[i][1])
            if choice is None or err < choice[0]:
                choice = (err, i, trunc)
        if choice is not None:
            err, i, trunc = choice
            value, noise = estimates[i]
            best = (value, noise, trunc, last)
            if err <= eps:
                return best
        last *= 2


def _extrapolated(desc, m, eps, prec, wp, max_terms):
    stream = TermStream(desc, m, wp)
    alpha = desc.alpha(m)
    ctx = _ctx(wp + 128)
    beta = ctx.sub(ctx.div(alpha.numerator, alpha.denominator), 1)
    first = max(64, 4 * stream.start + 64 + 8 * desc.inner(m))
    what = f"{desc.id} at m = {m}"

    def package(found):
        value, noise, trunc, last = found
        return _result(value, noise, trunc, prec, last - stream.start + 1, "monotone-extrapolation")

    try:
        found = richardson(stream, beta, desc.has_log_factor, eps, first, max_terms, what)
    except ConvergenceError as exc:
        raise ConvergenceError(str(exc), best=package(exc.best) if exc.best else None) from None
    return package(found)


def sum_series(
    family: FamilyId | str,
    m: int,
    eps,
    prec: int = DEFAULT_PREC,
    *,
    max_terms: int = DEFAULT_MAX_TERMS,
    max_accel: int = DEFAULT_MAX_ACCEL,
    strategy: Optional[str] = None,
    terms: Optional[int] = None,
) -> SumResult:
    """Sum ``family`` at ``m`` to absolute accuracy ``eps``.

    Alternating families use Chebyshev-weighted acceleration after an
    exactly summed head. Positive-tail families are summed directly with a
    tail bound when that is cheap, and otherwise by Richardson extrapolation
    of partial sums in the powers N^(-a+1-j) (and N^(-a+1-j) ln N for the
    odd-harmonic families). ``strategy`` forces a method; ``terms`` fixes the
    cut-off of a direct sum.
    """
    desc = _resolve(family, m)
    if prec < MIN_PREC:
        raise UsageError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    eps_q = Fraction(eps) if not isinstance(eps, float) else Fraction(eps)
    if eps_q <= 0:
        raise UsageError("eps must be positive")
    if strategy is not None and strategy not in STRATEGIES:
        raise UsageError(f"unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}")
    eps_f = _UP.div(mpz(eps_q.numerator), mpz(eps_q.denominator))
    wp = prec + 128

    if terms is not None:
        if strategy not in (None, "direct"):
            raise UsageError("a fixed term count only applies to direct summation")
        if desc.alternating:
            return _direct_alternating(desc, m, terms + desc.start_index(m) - 1, prec, wp)
        stream = TermStream(desc, m, wp)
        N = terms + stream.start - 1
        logs: dict[int, float] = {}
        _sample_logs(stream, N, logs)
        tail = _tail_from_logs(desc, N, logs, stream.last)
        return _result(stream.total, stream.rounding_radius(), tail, prec, terms, "direct")

    if desc.alternating:
        if strategy in (None, "alternating-accel"):
            return _accelerated(desc, m, eps_f, prec, wp, max_accel)
        raise StrategyError(f"{desc.id} is alternating; use alternating-accel or a fixed term count")
    if strategy == "alternating-accel":
        raise StrategyError(f"{desc.id} is not alternating")

    if strategy in (None, "direct") and desc.alpha(m) >= Fraction(5, 2):
        stream = TermStream(desc, m, wp)
        logs = {}
        checkpoint = max(256, 4 * stream.start + 64)
        found = _direct_positive(desc, m, eps_f, prec, max_terms, stream, logs, checkpoint)
        if found is not None:
            return found
        if strategy == "direct":
            raise ConvergenceError(f"{desc.id} at m = {m}: direct summation cannot reach {float(eps):.3g}")
    elif strategy == "direct":
        raise StrategyError(f"{desc.id} at m = {m} decays too slowly for a certified direct tail")
    return _extrapolated(desc, m, eps_f, prec, wp, max_terms)
