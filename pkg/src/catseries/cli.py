"""``catseries`` command line: verify, sum, constants, recognize, dougall."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from fractions import Fraction
from typing import Optional, Sequence

from .closedforms import FamilyId, rhs
from .dougall import DougallVariant, dougall_lhs, dougall_rhs
from .errors import CatSeriesError, ConvergenceError, UsageError
from .forms import parse_form
from .precision import CONSTANT_NAMES, DEFAULT_PREC, _UP, _ctx, constant, format_mpfr
from .recognizer import DEFAULT_COEFF_BOUND, DEFAULT_DENOM_BOUND, recognize_sum
from .series import STRATEGIES, sum_series
from .verifier import SuiteConfig, load_config_file, parse_m_range, run_suite

PREC_ENV = "CATSERIES_PREC"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _default_prec() -> int:
    raw = os.environ.get(PREC_ENV)
    if raw is None:
        return DEFAULT_PREC
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{PREC_ENV} must be an integer number of bits, got {raw!r}") from None


def _emit(args, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _cmd_verify(args) -> int:
    config = SuiteConfig()
    if args.config:
        config = load_config_file(args.config, config)
    changes = {}
    if args.prec is not None:
        changes["precision_bits"] = args.prec
    elif os.environ.get(PREC_ENV):
        changes["precision_bits"] = _default_prec()
    if args.tol is not None:
        tol = Fraction(args.tol)
        changes.update(tol_fast=tol, tol_accelerated=tol, tol_slow=tol)
    if args.out:
        changes["output"] = args.out
    if args.jobs is not None:
        changes["parallelism"] = args.jobs
    if args.no_properties:
        changes["properties"] = False
    config = replace(config, **changes)
    if args.family:
        families = [f for chunk in args.family for f in chunk.split(",") if f]
        config = config.restricted(families, parse_m_range(args.m) if args.m else None)
        if not args.all_properties:
            config = replace(config, properties=False)
    elif args.m:
        raise UsageError("--m needs --family")

    try:
        result = run_suite(config)
    except OSError as exc:
        print(f"catseries: cannot write report: {exc}", file=sys.stderr)
        return EXIT_FAIL

    lines = [r.line() for r in result.reports] + [p.line() for p in result.properties]
    lines.append(f"summary: {result.passed} passed, {result.failed} failed")
    _emit(args, result.to_dict(), lines)
    return result.exit_code


def _cmd_sum(args) -> int:
    prec = args.prec or _default_prec()
    try:
        res = sum_series(args.family, args.m, Fraction(args.eps), prec, strategy=args.strategy, terms=args.terms)
    except ConvergenceError as exc:
        print(f"catseries: {exc}", file=sys.stderr)
        if exc.best is None:
            return EXIT_FAIL
        res = exc.best
    payload = {
        "family": FamilyId.parse(args.family).value,
        "m": args.m,
        "value": res.value.to_decimal(),
        "radius": res.value.radius_str(),
        "terms_used": res.terms_used,
        "strategy": res.strategy,
        "tail_bound": format_mpfr(res.tail_bound.value, 3, round_up=True),
    }
    _emit(args, payload, [f"{k}: {v}" for k, v in payload.items()])
    return EXIT_OK


def _cmd_constants(args) -> int:
    prec = args.prec or _default_prec()
    payload = {}
    for name in CONSTANT_NAMES:
        c = constant(name, prec)
        payload[name] = {"value": c.to_decimal(), "radius": c.radius_str()}
    _emit(args, {"precision_bits": prec, "constants": payload},
          [f"{n:<14} {v['value']}  +- {v['radius']}" for n, v in payload.items()])
    return EXIT_OK


def _cmd_recognize(args) -> int:
    basis = [parse_form(b) for b in args.basis.split(",") if b.strip()]
    prec = args.prec or 0
    form = recognize_sum(args.family, args.m, basis, args.coeff_bound, args.denom_bound, prec or None)
    expected = rhs(args.family, args.m)
    payload = {
        "family": FamilyId.parse(args.family).value,
        "m": args.m,
        "basis": [str(b) for b in basis],
        "found": None if form is None else {"text": str(form), "terms": form.to_json()},
        "matches_closed_form": form == expected,
    }
    text = "no relation found" if form is None else str(form)
    _emit(args, payload, [f"{payload['family']} m={args.m}: {text}",
                          f"closed form: {expected}", f"match: {payload['matches_closed_form']}"])
    return EXIT_OK if form is not None else EXIT_FAIL


def _cmd_dougall(args) -> int:
    prec = args.prec or _default_prec()
    x = Fraction(args.x)
    left = dougall_lhs(args.variant, x, Fraction(args.eps), prec)
    right = dougall_rhs(args.variant, x, prec)
    diff = _UP.abs(_ctx(2 * prec).sub(left.value, right.value))
    tol = _UP.add(_UP.add(_UP.div(Fraction(args.eps).numerator, Fraction(args.eps).denominator), left.radius), right.radius)
    passed = diff <= tol
    payload = {
        "variant": DougallVariant.parse(args.variant).value,
        "x": str(x),
        "lhs": left.to_decimal(),
        "rhs": right.to_decimal(),
        "abs_diff": format_mpfr(diff, 3, round_up=True),
        "pass": passed,
    }
    _emit(args, payload, [f"{k}: {v}" for k, v in payload.items()])
    return EXIT_OK if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catseries", description="Verify Catalan-cube series against their closed forms.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, help=f"working precision in bits (default {DEFAULT_PREC} or ${PREC_ENV})")
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check families against their closed forms")
    p.add_argument("--family", action="append", help="family id, repeatable or comma separated")
    p.add_argument("--m", help="parameter M or range A..B (requires --family)")
    p.add_argument("--tol", help="one tolerance for every convergence class")
    p.add_argument("--out", help="write the JSON report to this file")
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--no-properties", action="store_true", help="skip the exact identity suites")
    p.add_argument("--all-properties", action="store_true", help="run the identity suites even with --family")
    p.set_defaults(run=_cmd_verify)

    p = sub.add_parser("sum", parents=[common], help="sum one series")
    p.add_argument("--family", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eps", default="1e-30")
    p.add_argument("--terms", type=int, help="fixed number of terms (direct summation)")
    p.add_argument("--strategy", choices=STRATEGIES)
    p.set_defaults(run=_cmd_sum)

    p = sub.add_parser("constants", parents=[common], help="print the basis constants")
    p.set_defaults(run=_cmd_constants)

    p = sub.add_parser("recognize", parents=[common], help="rediscover a closed form with PSLQ")
    p.add_argument("--family", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--basis", required=True, help='comma separated monomials, e.g. "1,pi^-2,ln2*pi^-2"')
    p.add_argument("--coeff-bound", type=int, default=DEFAULT_COEFF_BOUND)
    p.add_argument("--denom-bound", type=int, default=DEFAULT_DENOM_BOUND)
    p.set_defaults(run=_cmd_recognize)

    p = sub.add_parser("dougall", parents=[common], help="compare both sides of a cubed or fourth-power binomial sum at rational x")
    p.add_argument("--variant", required=True, choices=[v.value for v in DougallVariant])
    p.add_argument("--x", required=True, help="rational such as 7/3")
    p.add_argument("--eps", default="1e-15")
    p.set_defaults(run=_cmd_dougall)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except (CatSeriesError, ValueError, ZeroDivisionError) as exc:
        print(f"catseries: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
