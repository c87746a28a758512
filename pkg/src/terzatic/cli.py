"""Command-line front end.

Exit codes: 0 success / inequality holds, 1 violation (or selftest
failure), 2 invalid input, 3 enumeration cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .bounds import corollary8_check, theorem6_lower_check, theorem6_upper_check
from .core import (
    CAP_ENV_VAR,
    EnumerationCapError,
    ExactnessError,
    FunctionModel,
    MissingCertificateError,
    Mode,
    Polynomial,
    SimpleInstance,
    ValidationError,
    cube_log,
    format_scalar,
    linear_combination,
    parse_literal,
    polynomial,
    power,
    to_scalar,
)
from .functional import generalized_jensen, jensen
from .fuzz import FuzzConfig, run_fuzz, write_reproducers
from .instance_io import load_instance_file
from .oracle import run_selftest
from .superterzatic import CheckReport, Verdict, check_def2, check_lemma5, estimate_certificate

EXIT_OK, EXIT_VIOLATED, EXIT_INVALID, EXIT_CAP = 0, 1, 2, 3


def _json_scalar(value: Any) -> Any:
    if value is None:
        return None
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format_scalar(value)


def _print_scalar(value: Any) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return format(value, ".17g")


def report_dict(report: CheckReport, target: str) -> Dict[str, Any]:
    return {
        "target": target,
        "direction": report.direction.value,
        "lhs": _json_scalar(report.lhs),
        "rhs": _json_scalar(report.rhs),
        "slack": _json_scalar(report.slack),
        "verdict": report.verdict.value,
        "degenerate": report.verdict is Verdict.DEGENERATE,
        "tolerance": _json_scalar(report.tolerance),
        "c_used": _json_scalar(report.c_used),
        "barycenter": _json_scalar(report.barycenter),
        "barycenter_r": _json_scalar(report.barycenter_r),
    }


def parse_function(spec: str) -> FunctionModel:
    """``power:P``, ``cube_log``, ``poly:c0,c1,...`` or a ``+``-joined sum of ``s*term``."""
    spec = spec.strip()
    if "+" in spec:
        terms = []
        for part in spec.split("+"):
            scale, _, body = part.partition("*") if "*" in part else ("1", "", part)
            terms.append((parse_literal(scale), parse_function(body)))
        return linear_combination(terms)
    name, _, arg = spec.partition(":")
    if name == "power":
        return power(parse_literal(arg or "3"))
    if name == "cube_log":
        return cube_log()
    if name == "poly":
        return polynomial([parse_literal(c) for c in arg.split(",")])
    raise ValidationError(f"unknown function spec {spec!r}", "--function")


def parse_coeffs(text: str) -> Polynomial:
    text = text.strip().strip("[]")
    return Polynomial(tuple(parse_literal(c) for c in text.split(",") if c.strip()))


def parse_range(text: str, name: str) -> tuple:
    lo, sep, hi = text.partition(":")
    try:
        return (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise ValidationError(f"expected LO:HI, got {text!r}", name) from None


def _single_block(ginst, target: str) -> SimpleInstance:
    if ginst.k != 1:
        raise ValidationError(f"target {target} needs exactly one block, got {ginst.k}", "instance.blocks")
    b = ginst.blocks[0]
    return SimpleInstance(b.p, b.x)


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args: argparse.Namespace) -> int:
    doc = load_instance_file(args.file)
    f = doc.function
    ginst = doc.instance
    if args.functional == "jensen":
        if args.family == "r":
            if ginst.r_blocks is None:
                raise ValidationError("r weights requested but r_blocks is absent", "instance.r_blocks")
            value = jensen(f, SimpleInstance(ginst.r_blocks[0], _single_block(ginst, "jensen").x))
        else:
            value = jensen(f, _single_block(ginst, "jensen"))
    else:
        value = generalized_jensen(f, ginst, args.family)
    print(_print_scalar(value))
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    doc = load_instance_file(args.file)
    f = doc.effective_function
    ginst = doc.instance
    target = args.target
    kw = dict(direction=args.direction, rel_tol=args.tolerance)
    if target == "def2":
        report = check_def2(f, _single_block(ginst, target), args.direction, rel_tol=args.tolerance)
    elif target == "lemma5":
        report = check_lemma5(f, ginst, args.direction, rel_tol=args.tolerance)
    elif target == "thm6-lower":
        report = theorem6_lower_check(f, ginst, **kw)
    elif target == "thm6-upper":
        report = theorem6_upper_check(f, ginst, **kw)
    else:
        inst = _single_block(ginst, target)
        if ginst.r_blocks is None:
            raise ValidationError("r weights are required", "instance.r_blocks")
        side = "lower" if target == "cor8-lower" else "upper"
        report = corollary8_check(f, inst.x, inst.p, ginst.r_blocks[0], side, **kw)
    print(json.dumps(report_dict(report, target), indent=2))
    return EXIT_VIOLATED if report.verdict is Verdict.VIOLATED else EXIT_OK


def cmd_certificate(args: argparse.Namespace) -> int:
    f = parse_function(args.function)
    mode = Mode(args.mode) if args.mode else (Mode.RATIONAL if f.supports_exact else Mode.FLOAT)
    x_bar = to_scalar(args.x_bar, mode)
    est = estimate_certificate(f, x_bar, parse_range(args.n_range, "--n-range"), args.trials, args.seed,
                               to_scalar(args.domain_upper, mode), mode)
    lo, med, hi = est.thresholds_summary
    out = {
        "function": f.describe(),
        "x_bar": _json_scalar(est.x_bar),
        "samples": est.samples,
        "c_sup_estimate": _json_scalar(est.c_sup_estimate),
        "witness": {"p": [_json_scalar(v) for v in est.witness.p],
                    "x": [_json_scalar(v) for v in est.witness.x]},
        "thresholds_summary": {"min": _json_scalar(lo), "median": _json_scalar(med), "max": _json_scalar(hi)},
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_fuzz(args: argparse.Namespace) -> int:
    f = parse_function(args.function)
    cert = parse_coeffs(args.certificate) if args.certificate else None
    config = FuzzConfig(
        target=args.target.replace("-", "_"), function=f, certificate=cert, trials=args.trials,
        seed=args.seed, k_range=parse_range(args.k_range, "--k-range"),
        n_range=parse_range(args.n_range, "--n-range"), domain_upper=parse_literal(args.domain_upper),
        mode=Mode(args.mode), direction=args.direction, rel_tol=args.tolerance,
        r_equals_p=args.r_equals_p, workers=args.workers,
    )
    report = run_fuzz(config)
    written: List[str] = []
    if report.violations and args.out:
        written = [str(p) for p in write_reproducers(report, config, args.out, args.max_reproducers)]
    out = {
        "target": config.target,
        "function": f.describe(),
        "trials_run": report.trials_run,
        "violations": len(report.violations),
        "min_slack": _json_scalar(report.min_slack),
        "min_slack_trial": report.min_slack_trial,
        "degenerate": report.degenerate,
        "cap_errors": report.cap_errors,
        "first_violations": [{"trial": v.trial, "sub_seed": v.sub_seed, "slack": _json_scalar(v.report.slack)}
                             for v in report.violations[:5]],
        "reproducers": written,
    }
    print(json.dumps(out, indent=2))
    return EXIT_VIOLATED if report.violations else EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    failures, elapsed = run_selftest()
    for line in failures:
        print(f"FAIL {line}")
    print(f"selftest: {'ok' if not failures else f'{len(failures)} failure(s)'} in {elapsed:.2f}s")
    return EXIT_VIOLATED if failures else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="terzatic", description="Jensen functional and superterzatic bound checks")
    parser.add_argument("--cap", type=int, help=f"enumeration cap (overrides ${CAP_ENV_VAR})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a Jensen functional")
    p.add_argument("file")
    p.add_argument("--functional", choices=["jensen", "generalized"], default="generalized")
    p.add_argument("--family", choices=["p", "r"], default="p")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check", help="check one inequality on an instance file")
    p.add_argument("file")
    p.add_argument("--target", required=True,
                   choices=["def2", "lemma5", "thm6-lower", "thm6-upper", "cor8-lower", "cor8-upper"])
    p.add_argument("--direction", choices=["super", "sub"])
    p.add_argument("--tolerance", type=float, help="relative tolerance (default 1e-9 float, exact rational)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("certificate", help="estimate the largest feasible C(x_bar)")
    p.add_argument("--function", required=True, help="power:P | cube_log | poly:c0,c1,... | s*f+t*g")
    p.add_argument("--x-bar", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-range", default="2:6")
    p.add_argument("--domain-upper", default="1")
    p.add_argument("--mode", choices=["float", "rational"])
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("fuzz", help="random search for violations")
    p.add_argument("--target", required=True,
                   choices=["def2", "lemma5", "thm6-lower", "thm6-upper", "cor8-lower", "cor8-upper"])
    p.add_argument("--function", default="power:3")
    p.add_argument("--certificate", help="coefficients c0,c1,... of C(x_bar); default: the function's own")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["float", "rational"], default="float")
    p.add_argument("--k-range", default="1:3")
    p.add_argument("--n-range", default="1:4")
    p.add_argument("--domain-upper", default="1")
    p.add_argument("--direction", choices=["super", "sub"])
    p.add_argument("--tolerance", type=float)
    p.add_argument("--r-equals-p", action="store_true", help="use r weights identical to p")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="directory for reproducer instance files")
    p.add_argument("--max-reproducers", type=int, default=20)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("selftest", help="re-check the pinned exact examples")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = os.environ.get(CAP_ENV_VAR)
    if args.cap is not None:
        os.environ[CAP_ENV_VAR] = str(args.cap)
    try:
        return args.func(args)
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationError, ExactnessError, MissingCertificateError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    finally:
        if args.cap is not None:
            if saved is None:
                os.environ.pop(CAP_ENV_VAR, None)
            else:
                os.environ[CAP_ENV_VAR] = saved


if __name__ == "__main__":
    sys.exit(main())
