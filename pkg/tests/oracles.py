"""Independent reference computations shared by several test modules."""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache

import mpmath

from catseries import ClosedForm, parse_form, partial_sum, rhs, tail_bound, term
from catseries.series import descriptor
from catseries.verifier import DEFAULT_M_RANGES

TAIL_NS = (64, 256, 1024)


@lru_cache(maxsize=None)
def exact_partial(family: str, m: int, N: int) -> Fraction:
    return partial_sum(family, m, N)


def to_mp(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def grid_pairs(predicate=lambda desc, m: True) -> list[tuple[str, int]]:
    out = []
    for fam, (lo, hi) in DEFAULT_M_RANGES.items():
        desc = descriptor(fam)
        out.extend((fam.value, m) for m in range(lo, hi + 1) if predicate(desc, m))
    return out


def bounded_tail_pairs() -> list[tuple[str, int]]:
    """Positive-tail grid pairs whose decay is fast enough for an integral bound."""
    return grid_pairs(lambda d, m: not d.alternating and d.alpha(m) - 1 > Fraction(5, 4))


def too_slow_pairs() -> list[tuple[str, int]]:
    return grid_pairs(lambda d, m: not d.alternating and d.alpha(m) - 1 <= Fraction(5, 4))


def tail_check(family: str, m: int, N: int):
    """None when N is below the precondition, else (observed, bound) as mpmath numbers."""
    start = descriptor(family).start_index(m)
    if N < 4 * start + 64:
        return None
    observed = abs(exact_partial(family, m, 4 * N) - exact_partial(family, m, N))
    bound = tail_bound(family, m, N)
    with mpmath.workdps(60):
        return to_mp(observed), mpmath.mpf(bound.value) + mpmath.mpf(bound.radius)


BASIS_POOL = ("1", "pi", "pi^-1", "pi^-2", "G^4*pi^-3", "pi*G^-4", "ln2*pi^-2", "sqrt2", "pi^2*G^-4", "ln2")


def random_combinations(count: int, seed: int = 20261018):
    """Deterministic (basis, target form) pairs with small common denominators."""
    rng = random.Random(seed)
    for _ in range(count):
        basis = [parse_form(b) for b in rng.sample(BASIS_POOL, rng.randint(2, 3))]
        denom = rng.randint(1, 60)
        form = ClosedForm()
        for b in basis:
            num = rng.choice([n for n in range(-200, 201) if n])
            form = form + b * Fraction(num, denom)
        yield basis, form


# Displayed special cases. The m = 1 members are shown after the index shift
# k -> k + 1, which turns C_{k+1}/(4^{k+1}(2k+1)) into C_k/(2 * 4^k (k + 2)).
DISPLAYED = [
    ("F1", 0, "8 - 384*pi*G^-4"),
    ("F1", 1, "152/27 - 80/81*pi^-3*G^4"),
    ("F2", 0, "8 - 16*pi^-1"),
    ("F2", 1, "-8/9 + 128/27*pi^-1"),
    ("F3", 0, "-8 + 2*pi^-3*G^4"),
    ("F3", 1, "136/9 - 7168/9*pi*G^-4"),
    ("F4", 0, "8 + 64*pi^2*G^-4 - 640*pi*G^-4"),
    ("F4", 1, "392/81 - 120/729*pi^-2*G^4 - 256/729*pi^-3*G^4"),
    ("F5", 0, "16/3 - 16*pi^-1"),
    ("F5", 1, "-160/81 + 512/81*pi^-1"),
    ("F6", 0, "16 - 128*pi^-2"),
    ("F6", 1, "-176/27 + 16384/243*pi^-2"),
    ("F7", 0, "12 - 160*pi^-2 + 64*ln2*pi^-2"),
    ("F7", 1, "-220/27 + 75776/729*pi^-2 - 8192/243*ln2*pi^-2"),
]


def shifted_display(family: str, m: int):
    """The closed form in the variable of the displayed identity."""
    value = rhs(family, m)
    if m == 0:
        return value
    desc = descriptor(family)
    head = sum((term(family, 1, k) for k in range(desc.start_index(1), 1)), Fraction(0))
    sign = -1 if desc.alternating else 1
    return (value - head) * (sign * 2**desc.power)
