"""Certified summation and closed-form verification for Catalan-cube series."""

from .closedforms import FamilyId, cf_eval, gamma_quarter_cf, gamma_ratio_cf, rhs
from .combinatorics import (
    catalan,
    central_binomial,
    harmonic,
    half_integer_binomial,
    odd_harmonic,
    odd_product,
    quarter_harmonic_diff,
)
from .dougall import DougallVariant, dougall_lhs, dougall_rhs
from .errors import CatSeriesError, ConvergenceError, DomainError, PrecisionError, StrategyError, UsageError
from .forms import ClosedForm, parse_form
from .precision import TrackedReal, agm, constant, log_gamma, real_from_rational
from .recognizer import RelationResult, pslq, recognize, recognize_sum
from .series import FamilyDescriptor, SumResult, descriptor, partial_sum, sum_series, tail_bound, term
from .verifier import SuiteConfig, VerificationReport, run_suite, verify

__version__ = "0.1.0"

__all__ = [
    "CatSeriesError",
    "ClosedForm",
    "ConvergenceError",
    "DomainError",
    "DougallVariant",
    "FamilyDescriptor",
    "FamilyId",
    "PrecisionError",
    "RelationResult",
    "StrategyError",
    "SuiteConfig",
    "SumResult",
    "TrackedReal",
    "UsageError",
    "VerificationReport",
    "agm",
    "catalan",
    "central_binomial",
    "cf_eval",
    "constant",
    "descriptor",
    "dougall_lhs",
    "dougall_rhs",
    "gamma_quarter_cf",
    "gamma_ratio_cf",
    "half_integer_binomial",
    "harmonic",
    "log_gamma",
    "odd_harmonic",
    "odd_product",
    "parse_form",
    "partial_sum",
    "pslq",
    "quarter_harmonic_diff",
    "real_from_rational",
    "recognize",
    "recognize_sum",
    "rhs",
    "run_suite",
    "sum_series",
    "tail_bound",
    "term",
    "verify",
]
