"""Exact linear combinations of pi^a * G^b * (ln 2)^c * sqrt(2)^d.

G stands for Gamma(1/4). Coefficients are ``Fraction`` values. The exponent
``d`` is kept in {0, 1}: a square of sqrt(2) is folded into the coefficient.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import DomainError, UsageError

__all__ = ["ClosedForm", "Key", "parse_form"]

Key = tuple[int, int, int, int]
_ONE_KEY: Key = (0, 0, 0, 0)
_SYMBOLS = ("pi", "G", "ln2", "sqrt2")


def _normalize_key(a: int, b: int, c: int, d: int) -> tuple[Key, int]:
    """Fold sqrt(2)^d into d mod 2, returning the key and the factor 2^(d // 2)."""
    if c < 0:
        raise DomainError("negative powers of ln 2 are outside the basis")
    return (a, b, c, d % 2), d // 2


class ClosedForm:
    """Immutable finite map from exponent tuples (a, b, c, d) to rationals."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Key, object] | Iterable[tuple[Key, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Key, Fraction] = {}
        for key, coeff in items:
            if len(key) != 4:
                raise UsageError(f"exponent tuple must have four entries, got {key!r}")
            norm, twos = _normalize_key(*(int(e) for e in key))
            value = Fraction(coeff) * Fraction(2) ** twos
            acc[norm] = acc.get(norm, Fraction(0)) + value
        self._terms = {k: v for k, v in sorted(acc.items()) if v != 0}
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, q) -> "ClosedForm":
        return cls({_ONE_KEY: Fraction(q)})

    @classmethod
    def monomial(cls, coeff=1, a: int = 0, b: int = 0, c: int = 0, d: int = 0) -> "ClosedForm":
        return cls({(a, b, c, d): Fraction(coeff)})

    # -- mapping-like access -----------------------------------------------

    @property
    def terms(self) -> dict[Key, Fraction]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[tuple[Key, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, key: Key) -> Fraction:
        norm, twos = _normalize_key(*key)
        return self._terms.get(norm, Fraction(0)) * Fraction(2) ** twos

    def is_rational(self) -> bool:
        return all(k == _ONE_KEY for k in self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def rational_part(self) -> Fraction:
        return self._terms.get(_ONE_KEY, Fraction(0))

    # -- algebra -----------------------------------------------------------

    @staticmethod
    def _lift(other) -> "ClosedForm":
        if isinstance(other, ClosedForm):
            return other
        if isinstance(other, (int, Fraction)):
            return ClosedForm.rational(other)
        return NotImplemented

    def __add__(self, other) -> "ClosedForm":
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return ClosedForm(list(self._terms.items()) + list(o._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "ClosedForm":
        return ClosedForm({k: -v for k, v in self._terms.items()})

    def __sub__(self, other) -> "ClosedForm":
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other) -> "ClosedForm":
        return (-self) + other

    def __mul__(self, other) -> "ClosedForm":
        o = self._lift(other)
        if o is NotImplemented:
            return o
        out = []
        for k1, v1 in self._terms.items():
            for k2, v2 in o._terms.items():
                out.append((tuple(x + y for x, y in zip(k1, k2)), v1 * v2))
        return ClosedForm(out)

    __rmul__ = __mul__

    def inverse(self) -> "ClosedForm":
        """Reciprocal of a monomial free of ln 2."""
        if not self.is_monomial():
            raise DomainError("only monomials can be inverted exactly")
        (a, b, c, d), coeff = next(iter(self._terms.items()))
        if c:
            raise DomainError("inverting a power of ln 2 leaves the basis")
        # 1/sqrt(2) = sqrt(2)/2
        return ClosedForm({(-a, -b, 0, d): 1 / (coeff * 2**d)})

    def __truediv__(self, other) -> "ClosedForm":
        if isinstance(other, (int, Fraction)):
            return ClosedForm({k: v / Fraction(other) for k, v in self._terms.items()})
        if isinstance(other, ClosedForm):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other) -> "ClosedForm":
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int) -> "ClosedForm":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** -n
        out = ClosedForm.rational(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- evaluation --------------------------------------------------------

    def evaluate(self, prec: int):
        from .closedforms import cf_eval

        return cf_eval(self, prec)

    # -- text and JSON -----------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        # rational part first, then the remaining monomials in key order
        keys = sorted(self._terms, key=lambda k: (k != _ONE_KEY, k))
        parts = []
        for i, key in enumerate(keys):
            text = _format_term(key, self._terms[key])
            if i == 0:
                parts.append(text)
            elif text.startswith("-"):
                parts.append("- " + text[1:])
            else:
                parts.append("+ " + text)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"ClosedForm({str(self)!r})"

    def to_json(self) -> dict[str, str]:
        return {",".join(str(e) for e in k): _fraction_text(v) for k, v in self._terms.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "ClosedForm":
        items = []
        for key, value in data.items():
            exps = tuple(int(e) for e in key.split(","))
            items.append((exps, Fraction(value)))
        return cls(items)


def _fraction_text(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _format_term(key: Key, coeff: Fraction) -> str:
    factors = []
    for sym, exp in zip(_SYMBOLS, key):
        if exp == 1:
            factors.append(sym)
        elif exp:
            factors.append(f"{sym}^{exp}")
    sign = "-" if coeff < 0 else ""
    mag = abs(coeff)
    if not factors:
        return sign + str(mag)
    if mag == 1:
        return sign + "*".join(factors)
    return sign + str(mag) + "*" + "*".join(factors)


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")
_FACTOR = re.compile(r"^(pi|G|ln2|sqrt2)(?:\^\(?(-?\d+)\)?)?$")


def parse_form(text: str) -> ClosedForm:
    """Parse the pretty-printed syntax, e.g. ``"8 - 384*pi*G^-4"``.

    Exponents may be negative (``G^-4``); a term is a product of an optional
    rational and any of ``pi``, ``G``, ``ln2``, ``sqrt2``.
    """
    src = text.strip()
    if not src:
        raise UsageError("empty closed-form expression")
    # protect the minus signs inside exponents before splitting on +/-
    guarded = re.sub(r"\^\s*-", "^~", src)
    pieces = _TERM_SPLIT.split(guarded)
    if pieces and pieces[0] == "":
        pieces = pieces[1:]
    else:
        pieces = ["+"] + pieces
    total = ClosedForm()
    for sign, body in zip(pieces[0::2], pieces[1::2]):
        term = _parse_term(body.replace("^~", "^-"), text)
        total = total + (term if sign == "+" else -term)
    return total


def _parse_term(body: str, original: str) -> ClosedForm:
    coeff = Fraction(1)
    exps = [0, 0, 0, 0]
    for raw in body.split("*"):
        factor = raw.strip()
        match = _FACTOR.match(factor)
        if match:
            idx = _SYMBOLS.index(match.group(1))
            exps[idx] += int(match.group(2) or 1)
            continue
        try:
            coeff *= Fraction(factor)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"cannot parse factor {factor!r} in {original!r}") from None
    return ClosedForm({tuple(exps): coeff})
