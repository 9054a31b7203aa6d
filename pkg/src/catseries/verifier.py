"""Check every family against its closed form and run the exact identity suites.

:func:`verify` compares one (family, m) pair and always returns a report;
:func:`run_suite` fans the default grid out to a process pool and collects
the reports in a fixed order.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional

from gmpy2 import mpfr, mpz

from .closedforms import (
    FamilyId,
    cf_eval,
    gamma_quarter_cf,
    gamma_ratio_cf,
    min_m,
    rhs,
    sign_cos_minus,
    sign_cos_plus,
    sign_sin_minus,
    sign_sin_plus,
)
from .combinatorics import catalan, central_binomial, half_integer_binomial, odd_harmonic, odd_product
from .errors import CatSeriesError, ConvergenceError, StrategyError, UsageError
from .forms import ClosedForm
from .precision import DEFAULT_PREC, MIN_PREC, _UP, _ctx, constant, format_mpfr, log_gamma, real_from_rational
from .series import DEFAULT_MAX_ACCEL, DEFAULT_MAX_TERMS, descriptor, sum_series

__all__ = [
    "CLASSES",
    "DEFAULT_M_RANGES",
    "SuiteConfig",
    "SuiteResult",
    "VerificationReport",
    "PropertyOutcome",
    "PROPERTY_SUITES",
    "verify",
    "run_properties",
    "run_suite",
]

CLASSES = ("fast", "accelerated", "slow-monotone")

DEFAULT_M_RANGES: dict[FamilyId, tuple[int, int]] = {
    **{f: (0, 5) for f in (FamilyId.F1, FamilyId.F2, FamilyId.F3, FamilyId.F4, FamilyId.F5, FamilyId.F6, FamilyId.F7, FamilyId.F11)},
    **{f: (0, 3) for f in (FamilyId.F1a, FamilyId.F3a, FamilyId.F11a, FamilyId.F11b)},
    FamilyId.F1b: (1, 3),
    FamilyId.F3b: (1, 3),
    FamilyId.F8: (0, 4),
    FamilyId.F9: (0, 4),
    FamilyId.F10: (1, 5),
}

# the summation target sits this far below the pass tolerance
_EPS_DIVISOR = 16


def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {value!r}") from None


def parse_m_range(text: str) -> tuple[int, int]:
    """'3' -> (3, 3); '0..5' -> (0, 5)."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise UsageError(f"bad m range {text!r}; use M or A..B") from None


@dataclass(frozen=True)
class SuiteConfig:
    """Settings for a verification run."""

    precision_bits: int = DEFAULT_PREC
    tol_fast: Fraction = Fraction(1, 10**25)
    tol_accelerated: Fraction = Fraction(1, 10**12)
    tol_slow: Fraction = Fraction(1, 10**8)
    m_ranges: Mapping[FamilyId, tuple[int, int]] = field(default_factory=lambda: dict(DEFAULT_M_RANGES))
    max_terms: int = DEFAULT_MAX_TERMS
    max_accel: int = DEFAULT_MAX_ACCEL
    parallelism: int = 1
    output: Optional[str] = None
    properties: bool = True

    def __post_init__(self):
        for name in ("tol_fast", "tol_accelerated", "tol_slow"):
            object.__setattr__(self, name, _fraction(getattr(self, name)))
        ranges = {FamilyId.parse(k): tuple(v) for k, v in dict(self.m_ranges).items()}
        object.__setattr__(self, "m_ranges", ranges)

    def tolerance(self, convergence_class: str) -> Fraction:
        return {
            "fast": self.tol_fast,
            "accelerated": self.tol_accelerated,
            "slow-monotone": self.tol_slow,
        }[convergence_class]

    def validate(self) -> "SuiteConfig":
        if self.precision_bits < MIN_PREC:
            raise UsageError(f"precision must be at least {MIN_PREC} bits, got {self.precision_bits}")
        floor = Fraction(1, 2 ** (self.precision_bits - 32))
        for cls in CLASSES:
            tol = self.tolerance(cls)
            if tol <= floor:
                raise UsageError(
                    f"{cls} tolerance {float(tol):.3g} is not above 2^-{self.precision_bits - 32} "
                    f"at {self.precision_bits} bits; raise the precision or the tolerance"
                )
        if self.max_terms < 1 or self.max_accel < 1:
            raise UsageError("term limits must be positive")
        if self.parallelism < 1:
            raise UsageError("parallelism must be at least 1")
        for fam, (lo, hi) in self.m_ranges.items():
            if lo > hi:
                raise UsageError(f"empty m range {lo}..{hi} for {fam}")
            if lo < min_m(fam):
                raise UsageError(f"{fam} requires m >= {min_m(fam)}, range starts at {lo}")
        return self

    def pairs(self) -> list[tuple[FamilyId, int]]:
        """Every (family, m) pair in enumeration order."""
        return [
            (fam, m)
            for fam in FamilyId
            if fam in self.m_ranges
            for m in range(self.m_ranges[fam][0], self.m_ranges[fam][1] + 1)
        ]

    def restricted(self, families: Iterable[str], m_range: Optional[tuple[int, int]] = None) -> "SuiteConfig":
        """Keep only ``families``; optionally replace their m ranges."""
        chosen = [FamilyId.parse(f) for f in families]
        ranges = {f: (m_range or self.m_ranges.get(f) or DEFAULT_M_RANGES[f]) for f in chosen}
        return replace(self, m_ranges=ranges)

    def to_dict(self) -> dict:
        return {
            "precision_bits": self.precision_bits,
            "tol_fast": _frac_text(self.tol_fast),
            "tol_accelerated": _frac_text(self.tol_accelerated),
            "tol_slow": _frac_text(self.tol_slow),
            "m_ranges": {f.value: f"{lo}..{hi}" for f, (lo, hi) in self.m_ranges.items()},
            "max_terms": self.max_terms,
            "max_accel": self.max_accel,
            "parallelism": self.parallelism,
            "output": self.output,
            "properties": self.properties,
        }

    @classmethod
    def from_mapping(cls, values: Mapping[str, str], base: Optional["SuiteConfig"] = None) -> "SuiteConfig":
        """Build a config from string key/value pairs (config file or JSON)."""
        base = base or cls()
        known = {f.name for f in fields(cls)}
        changes: dict = {}
        ranges = dict(base.m_ranges)
        for raw_key, raw in values.items():
            key = raw_key.strip()
            if key == "m_ranges" and isinstance(raw, Mapping):
                ranges = {FamilyId.parse(k): parse_m_range(str(v)) for k, v in raw.items()}
                continue
            if key.startswith("m_range."):
                ranges[FamilyId.parse(key.split(".", 1)[1])] = parse_m_range(str(raw).strip())
                continue
            if key not in known or key == "m_ranges":
                raise UsageError(f"unknown configuration key {key!r}")
            text = raw if not isinstance(raw, str) else raw.strip()
            try:
                if key in ("precision_bits", "max_terms", "max_accel", "parallelism"):
                    changes[key] = int(text)
                elif key == "properties":
                    changes[key] = text if isinstance(text, bool) else str(text).lower() in ("1", "true", "yes", "on")
                elif key == "output":
                    changes[key] = text or None
                else:
                    changes[key] = _fraction(text)
            except ValueError:
                raise UsageError(f"bad value {raw!r} for {key}") from None
        return replace(base, m_ranges=ranges, **changes)


def load_config_file(path: str | os.PathLike, base: Optional[SuiteConfig] = None) -> SuiteConfig:
    """Read ``key = value`` lines; '#' starts a comment."""
    values: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return SuiteConfig.from_mapping(values, base)


def _frac_text(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# -- reports -----------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    family: FamilyId
    m: int
    lhs: str
    lhs_radius: str
    rhs: str
    rhs_radius: str
    rhs_symbolic: ClosedForm
    abs_diff: str
    tolerance: str
    convergence_class: str
    terms_used: int
    strategy: str
    elapsed_ms: int
    passed: bool
    diagnostic: Optional[str] = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["family"] = self.family.value
        out["rhs_symbolic"] = {"text": str(self.rhs_symbolic), "terms": self.rhs_symbolic.to_json()}
        out["pass"] = out.pop("passed")
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "VerificationReport":
        values = dict(data)
        values["family"] = FamilyId.parse(values["family"])
        values["rhs_symbolic"] = ClosedForm.from_json(values["rhs_symbolic"]["terms"])
        values["passed"] = values.pop("pass")
        return cls(**values)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))

    def deterministic_fields(self) -> dict:
        """Everything except the wall-clock time."""
        out = self.to_dict()
        out.pop("elapsed_ms")
        return out

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"{status} {self.family.value:<5} m={self.m:<2} diff={self.abs_diff:<12} "
            f"tol={float(Fraction(self.tolerance)):.0e} {self.strategy} ({self.terms_used} terms, {self.elapsed_ms} ms)"
        )
        return text + (f"  [{self.diagnostic}]" if self.diagnostic else "")


def _short(x: mpfr) -> str:
    return format_mpfr(x, 3, round_up=True)


def verify(family, m: int, config: Optional[SuiteConfig] = None) -> VerificationReport:
    """Sum the left-hand side, evaluate the closed form, and compare.

    Bad arguments raise :class:`UsageError` before any work. A summation that
    fails to converge produces a failing report instead of an exception.
    """
    config = (config or SuiteConfig()).validate()
    fam = FamilyId.parse(family)
    desc = descriptor(fam)
    desc.check_m(m)
    prec = config.precision_bits
    cls = desc.convergence_class(m)
    tol = config.tolerance(cls)
    started = time.perf_counter()

    symbolic = rhs(fam, m)
    right = cf_eval(symbolic, prec)
    diagnostic = None
    try:
        result = sum_series(fam, m, tol / _EPS_DIVISOR, prec, max_terms=config.max_terms, max_accel=config.max_accel)
    except (ConvergenceError, StrategyError) as exc:
        diagnostic = f"{type(exc).__name__}: {exc}"
        result = getattr(exc, "best", None)
    elapsed = int(round((time.perf_counter() - started) * 1000))

    if result is None:
        return VerificationReport(
            fam, m, "nan", "inf", right.to_decimal(), _short(right.radius), symbolic,
            "inf", _frac_text(tol), cls, 0, "none", elapsed, False, diagnostic,
        )
    left = result.value
    diff = _UP.abs(_ctx(2 * prec + 64).sub(left.value, right.value))
    tol_up = _UP.div(mpz(tol.numerator), mpz(tol.denominator))
    allowed = _UP.add(_UP.add(tol_up, left.radius), right.radius)
    return VerificationReport(
        family=fam,
        m=m,
        lhs=left.to_decimal(),
        lhs_radius=_short(left.radius),
        rhs=right.to_decimal(),
        rhs_radius=_short(right.radius),
        rhs_symbolic=symbolic,
        abs_diff=_short(diff),
        tolerance=_frac_text(tol),
        convergence_class=cls,
        terms_used=result.terms_used,
        strategy=result.strategy,
        elapsed_ms=elapsed,
        passed=diagnostic is None and diff <= allowed,
        diagnostic=diagnostic,
    )


# -- exact identity suites --------------------------------------------------------------


@dataclass(frozen=True)
class PropertyOutcome:
    name: str
    passed: bool
    checked: int
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} property {self.name} ({self.checked} cases){': ' + self.detail if self.detail else ''}"


def _run_checks(name: str, cases: Iterable) -> PropertyOutcome:
    count = 0
    for label, ok in cases:
        count += 1
        if not ok:
            return PropertyOutcome(name, False, count, f"fails at {label}")
    return PropertyOutcome(name, True, count)


def catalan_recurrence(limit: int = 500) -> PropertyOutcome:
    return _run_checks(
        "catalan-recurrence",
        (
            (j, (j + 2) * catalan(j + 1) == 2 * (2 * j + 1) * catalan(j) and catalan(j) * (j + 1) == central_binomial(j))
            for j in range(limit + 1)
        ),
    )


def binomial_bridge(limit: int = 25) -> PropertyOutcome:
    """binom(r + 1/2, k + 1) as a product of Catalan numbers and odd factors."""

    def cases():
        for r in range(limit + 1):
            scale = Fraction((-1) ** r * _factorial(r + 2) * catalan(r + 1), 2 ** (r + 2))
            for k in range(limit + 1):
                right = scale * (-1) ** k * Fraction(catalan(k), 4**k) * odd_product(k, r)
                yield (r, k), half_integer_binomial(r, k) == right

    return _run_checks("half-integer-binomial-bridge", cases())


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def odd_harmonic_symmetry(limit: int = 50) -> PropertyOutcome:
    return _run_checks("odd-harmonic-symmetry", ((n, odd_harmonic(-n) == odd_harmonic(n)) for n in range(limit + 1)))


def trig_parity(limit: int = 20, prec: int = 128) -> PropertyOutcome:
    """The +-1 sign rules against sqrt(2) cos and sin at odd multiples of pi/4."""
    pi = constant("PI", prec)
    root2 = constant("SQRT2", prec)

    def cases():
        for m in range(-limit, limit + 1):
            plus = pi * Fraction(2 * m + 1, 4)
            minus = pi * Fraction(2 * m - 1, 4)
            for label, sign, value in (
                ("cos+", sign_cos_plus(m), plus.cos()),
                ("sin+", sign_sin_plus(m), plus.sin()),
                ("cos-", sign_cos_minus(m), minus.cos()),
                ("sin-", sign_sin_minus(m), minus.sin()),
            ):
                yield (label, m), (value * root2).overlaps(real_from_rational(sign, prec), Fraction(1, 2**100))

    return _run_checks("trig-parity", cases())


_REPARAMETERIZATIONS = (
    (FamilyId.F1a, FamilyId.F1, lambda m: 2 * m),
    (FamilyId.F1b, FamilyId.F1, lambda m: 2 * m - 1),
    (FamilyId.F3a, FamilyId.F3, lambda m: 2 * m),
    (FamilyId.F3b, FamilyId.F3, lambda m: 2 * m - 1),
    (FamilyId.F11a, FamilyId.F11, lambda m: 2 * m),
    (FamilyId.F11b, FamilyId.F11, lambda m: 2 * m + 1),
)


def reparameterizations(limit: int = 12) -> PropertyOutcome:
    """Even/odd sub-families coincide with their parent at 2m and 2m -+ 1."""

    def cases():
        for child, parent, shift in _REPARAMETERIZATIONS:
            for m in range(min_m(child), limit + 1):
                yield (child.value, m), rhs(child, m) == rhs(parent, shift(m))

    return _run_checks("reparameterization", cases())


def quarter_gamma_values(limit: int = 41, prec: int = 256) -> PropertyOutcome:
    """Exact quarter-integer Gamma values against the numeric log-Gamma."""
    bound = Fraction(1, 2**240)
    pi = constant("PI", prec + 64)

    def numeric(n: int):
        u = Fraction(n, 4)
        if u > 0:
            return log_gamma(u, prec + 64).exp()
        # reflection: Gamma(u) = pi / (sin(pi u) Gamma(1 - u))
        return pi / ((pi * u).sin() * log_gamma(1 - u, prec + 64).exp())

    def cases():
        for n in range(-limit, limit + 1, 2):
            exact = cf_eval(gamma_quarter_cf(n), prec)
            value = numeric(n)
            scale = max(1, math.ceil(float(value.magnitude())))
            yield n, exact.overlaps(value, bound * scale)

    return _run_checks("quarter-gamma-values", cases())


def gamma_ratio_recurrences(limit: int = 15) -> PropertyOutcome:
    """Both shifted Gamma-ratio recurrences, checked as exact closed forms."""

    def cases():
        for m in range(-limit, limit + 1):
            n = 2 * m + 1
            first = gamma_quarter_cf(6 * m + 7) / gamma_quarter_cf(2 * m + 5) ** 3
            yield ("first", m), first == gamma_ratio_cf(n) * Fraction(48, n * n)
            n = 2 * m - 1
            second = gamma_quarter_cf(6 * m + 5) / gamma_quarter_cf(2 * m + 3) ** 3
            yield ("second", m), second == gamma_ratio_cf(n) * Fraction(12 * (6 * m + 1), n * n)
            yield ("ratio", m), gamma_ratio_cf(n) == gamma_quarter_cf(3 * n) / gamma_quarter_cf(n) ** 3

    return _run_checks("gamma-ratio-recurrences", cases())


PROPERTY_SUITES: tuple[Callable[[], PropertyOutcome], ...] = (
    catalan_recurrence,
    binomial_bridge,
    odd_harmonic_symmetry,
    trig_parity,
    reparameterizations,
    quarter_gamma_values,
    gamma_ratio_recurrences,
)


def run_properties() -> list[PropertyOutcome]:
    out = []
    for suite in PROPERTY_SUITES:
        try:
            out.append(suite())
        except CatSeriesError as exc:
            out.append(PropertyOutcome(suite.__name__, False, 0, str(exc)))
    return out


# -- suite runner ----------------------------------------------------------------------


@dataclass(frozen=True)
class SuiteResult:
    config: SuiteConfig
    reports: list[VerificationReport]
    properties: list[PropertyOutcome]

    @property
    def passed(self) -> int:
        return sum(r.passed for r in self.reports)

    @property
    def failed(self) -> int:
        return len(self.reports) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0 and all(p.passed for p in self.properties)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "reports": [r.to_dict() for r in self.reports],
            "properties": [asdict(p) for p in self.properties],
            "summary": {"pass": self.passed, "fail": self.failed},
        }

    def write(self, path: str | os.PathLike) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def _verify_job(args: tuple[str, int, SuiteConfig]) -> VerificationReport:
    family, m, config = args
    return verify(family, m, config)


def run_suite(config: Optional[SuiteConfig] = None) -> SuiteResult:
    """Verify every configured pair, then the exact identity suites.

    Reports come back in (family, m) order whatever the worker count.
    """
    config = (config or SuiteConfig()).validate()
    jobs = [(fam.value, m, config) for fam, m in config.pairs()]
    if config.parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            reports = list(pool.map(_verify_job, jobs))
    else:
        reports = [_verify_job(job) for job in jobs]
    properties = run_properties() if config.properties else []
    result = SuiteResult(config, reports, properties)
    if config.output:
        result.write(config.output)
    return result
