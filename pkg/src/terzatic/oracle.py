"""Exact rational re-evaluation and brute-force reference computations.

The ``brute_*`` functions deliberately avoid the optimized paths (atom
merging, factored extrema, compact bracket forms) so they can serve as
independent checks of them.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .bounds import (
    RatioExtrema,
    corollary8_check,
    ratio_extrema,
    replicate_instance,
    theorem6_lower_check,
    theorem6_upper_check,
)
from .core import (
    Block,
    EnumerationCapError,
    ExactnessError,
    FunctionModel,
    GeneralInstance,
    Mode,
    PointVector,
    Scalar,
    SimpleInstance,
    ValidationError,
    Weights,
    barycenter,
    cube_sharp_certificate,
    general_barycenter,
    make_weights,
    parse_literal,
    power,
    terza_quotient,
)
from .functional import generalized_jensen, jensen, tensor_distribution
from .superterzatic import (
    check_def2,
    check_lemma5,
    def2_rhs,
    def2_rhs_alt,
    estimate_certificate,
    feasibility_threshold,
    lemma5_rhs,
)

BRUTE_CAP = 10**4


class ExactContext:
    """Builds rational-mode inputs from exact literals and refuses anything inexact."""

    mode = Mode.RATIONAL

    @staticmethod
    def scalar(literal: Any) -> Fraction:
        if isinstance(literal, Fraction):
            return literal
        if isinstance(literal, bool) or isinstance(literal, float):
            raise ExactnessError(f"{literal!r} is not an exact literal; use a string or int")
        if isinstance(literal, int):
            return Fraction(literal)
        if isinstance(literal, str):
            return parse_literal(literal)
        raise ExactnessError(f"unsupported literal {literal!r}")

    def weights(self, literals: Sequence[Any]) -> Weights:
        return Weights(tuple(self.scalar(v) for v in literals), Mode.RATIONAL)

    def points(self, literals: Sequence[Any], domain_upper: Any = 1) -> PointVector:
        return PointVector(tuple(self.scalar(v) for v in literals), self.scalar(domain_upper), Mode.RATIONAL)

    def simple(self, p: Sequence[Any], x: Sequence[Any], domain_upper: Any = 1) -> SimpleInstance:
        return SimpleInstance(self.weights(p), self.points(x, domain_upper))

    def general(self, q: Sequence[Any], blocks: Sequence[Tuple[Sequence[Any], Sequence[Any]]],
                r_blocks: Optional[Sequence[Sequence[Any]]] = None, domain_upper: Any = 1) -> GeneralInstance:
        built = [(self.weights(p), self.points(x, domain_upper)) for p, x in blocks]
        rb = None if r_blocks is None else tuple(self.weights(r) for r in r_blocks)
        return GeneralInstance(self.weights(q), tuple(Block(p, x) for p, x in built), rb)


def _require_exact(f: FunctionModel, inst: Any) -> None:
    if not f.supports_exact:
        raise ExactnessError(f"{f.describe()} cannot be evaluated exactly")
    if inst is not None and inst.mode is not Mode.RATIONAL:
        raise ExactnessError("exact evaluation requires a rational-mode instance")


def exact_evaluate(check_id: str, inputs: Dict[str, Any]):
    """Re-evaluate one quantity entirely in rational arithmetic.

    ``inputs`` carries ``f`` plus ``inst`` (single block) or ``ginst``, and
    optionally ``c`` (certificate override) and ``family``.
    """
    f = inputs.get("f")
    inst = inputs.get("inst")
    ginst = inputs.get("ginst")
    c = inputs.get("c")
    if c is not None:
        c = ExactContext.scalar(c)
    if check_id != "ratio_extrema":
        _require_exact(f, inst if inst is not None else ginst)
    elif ginst.mode is not Mode.RATIONAL:
        raise ExactnessError("exact evaluation requires a rational-mode instance")
    if check_id == "jensen":
        return jensen(f, inst)
    if check_id == "generalized_jensen":
        return generalized_jensen(f, ginst, inputs.get("family", "p"))
    if check_id == "def2":
        return check_def2(f, inst, inputs.get("direction"), c)
    if check_id == "lemma5":
        return check_lemma5(f, ginst, inputs.get("direction"), c)
    if check_id == "thm6_lower":
        return theorem6_lower_check(f, ginst, None, c, direction=inputs.get("direction"))
    if check_id == "thm6_upper":
        return theorem6_upper_check(f, ginst, None, c, direction=inputs.get("direction"))
    if check_id == "threshold":
        return feasibility_threshold(f, inst)
    if check_id == "ratio_extrema":
        return ratio_extrema(ginst)
    raise ValidationError(f"unknown check id {check_id!r}", "check_id")


# ---------------------------------------------------------------------------
# brute force


def _plain_sum(values, mode: Mode):
    values = list(values)
    if mode is Mode.RATIONAL:
        total = Fraction(0)
        for v in values:
            total += v
        return total
    return math.fsum(values)


def _enumerate(ginst: GeneralInstance, cap: int):
    n = math.prod(ginst.sizes)
    if n > cap:
        raise EnumerationCapError(n, cap)
    return itertools.product(*(range(s) for s in ginst.sizes))


def brute_ratio_extrema(ginst: GeneralInstance, cap: int = BRUTE_CAP) -> RatioExtrema:
    """Min and max of the full tensor weight ratio by enumerating every multi-index.

    Rational inputs are handled as integer numerator/denominator products
    compared by cross-multiplication, which skips per-step normalization.
    """
    if ginst.r_blocks is None:
        raise ValidationError("r_blocks required", "r_blocks")
    exact = ginst.mode is Mode.RATIONAL
    # per entry: ratio p/r as (num, den), both positive
    parts = []
    for b, r in zip(ginst.blocks, ginst.r_blocks):
        if exact:
            parts.append([(p.numerator * w.denominator, p.denominator * w.numerator) for p, w in zip(b.p, r)])
        else:
            parts.append([(p, w) for p, w in zip(b.p, r)])
    lo = hi = None
    arg_lo = arg_hi = None
    for idx in _enumerate(ginst, cap):
        num = den = 1
        for i, j in enumerate(idx):
            a, d = parts[i][j]
            num *= a
            den *= d
        if lo is None or num * lo[1] < lo[0] * den:
            lo, arg_lo = (num, den), idx
        if hi is None or num * hi[1] > hi[0] * den:
            hi, arg_hi = (num, den), idx
    ratio = (lambda nd: Fraction(*nd)) if exact else (lambda nd: nd[0] / nd[1])
    return RatioExtrema(ratio(lo), ratio(hi), tuple(j + 1 for j in arg_lo), tuple(j + 1 for j in arg_hi))


def brute_generalized_jensen(f: Callable, ginst: GeneralInstance, family: str = "p",
                             cap: int = 10**7) -> Scalar:
    """Unmerged multi-index sum minus ``f`` at the nested barycenter."""
    mode = ginst.mode
    weights = ginst.weight_family(family)
    terms = []
    for idx in _enumerate(ginst, cap):
        w = 1
        s = []
        for i, j in enumerate(idx):
            w = w * weights[i][j]
            s.append(ginst.q[i] * ginst.blocks[i].x[j])
        terms.append(w * f(_plain_sum(s, mode)))
    centre = _plain_sum((ginst.q[i] * _plain_sum((w * x for w, x in zip(weights[i], b.x)), mode)
                         for i, b in enumerate(ginst.blocks)), mode)
    return _plain_sum(terms, mode) - f(centre)


def brute_jensen(f: Callable, inst: SimpleInstance) -> Scalar:
    mode = inst.mode
    centre = _plain_sum((p * x for p, x in zip(inst.p, inst.x)), mode)
    return _plain_sum((p * f(x) for p, x in zip(inst.p, inst.x)), mode) - f(centre)


def _quotient(f: Callable, d: Scalar) -> Scalar:
    if d == 0:
        return d * 0
    return f(-d if d < 0 else d) / (-d if d < 0 else d)


def brute_threshold(f: Callable, inst: SimpleInstance) -> Scalar:
    """``(J - B) / A`` with ``A`` and ``B`` accumulated term by term."""
    mode = inst.mode
    centre = _plain_sum((p * x for p, x in zip(inst.p, inst.x)), mode)
    a_terms, b_terms = [], []
    for p, x in zip(inst.p, inst.x):
        d = x - centre
        a_terms.append(p * d * d)
        b_terms.append(p * x * _quotient(f, d))
    a = _plain_sum(a_terms, mode)
    if a == 0:
        return math.inf
    return (brute_jensen(f, inst) - _plain_sum(b_terms, mode)) / a


def brute_def2_rhs(f: Callable, c: Scalar, inst: SimpleInstance) -> Scalar:
    mode = inst.mode
    centre = _plain_sum((p * x for p, x in zip(inst.p, inst.x)), mode)
    return _plain_sum((p * x * ((x - centre) * c + _quotient(f, x - centre))
                       for p, x in zip(inst.p, inst.x)), mode)


# ---------------------------------------------------------------------------
# pinned examples


@dataclass(frozen=True)
class PinnedExample:
    name: str
    compute: Callable[[], Any]
    expected: Any


def _pinned() -> List[PinnedExample]:
    X = ExactContext()
    F = Fraction
    cube = power(3)
    sharp = cube.with_certificate(cube_sharp_certificate())
    half = X.simple(["1/2", "1/2"], [0, 1])
    quarter = X.simple(["1/4", "3/4"], [0, 1])
    upper_half = X.simple(["1/2", "1/2"], ["1/2", 1])
    k2 = X.general(["1/2", "1/2"], [(["1/2", "1/2"], [0, 1])] * 2)
    k1r = X.general([1], [(["1/2", "1/2"], [0, 1])], r_blocks=[["1/4", "3/4"]])
    k2r = X.general(["1/2", "1/2"], [(["3/10", "7/10"], [0, 1])] * 2,
                    r_blocks=[["1/2", "1/2"]] * 2)
    x01 = X.points([0, 1])
    p_half = X.weights(["1/2", "1/2"])
    r_q = X.weights(["1/4", "3/4"])

    def extrema(e):
        return (e.m, e.M)

    return [
        PinnedExample("make_weights (1,3)", lambda: make_weights([1, 3]).w, (F(1, 4), F(3, 4))),
        PinnedExample("barycenter p=(1/4,3/4) x=(0,1)", lambda: barycenter(quarter), F(3, 4)),
        PinnedExample("general_barycenter k=2", lambda: general_barycenter(k2, "p"), F(1, 2)),
        PinnedExample("terza_quotient x^3 d=0", lambda: terza_quotient(cube, F(0)), F(0)),
        PinnedExample("terza_quotient x^3 d=1/2", lambda: terza_quotient(cube, F(1, 2)), F(1, 4)),
        PinnedExample("terza_quotient x^3 d=-1/4", lambda: terza_quotient(cube, F(-1, 4)), F(1, 16)),
        PinnedExample("jensen x^3 p=(1/2,1/2) x=(0,1)", lambda: jensen(cube, half), F(3, 8)),
        PinnedExample("jensen x^3 p=(1/4,3/4) x=(0,1)", lambda: jensen(cube, quarter), F(21, 64)),
        PinnedExample("tensor_distribution k=2 merged",
                      lambda: tensor_distribution(k2, "p", merge=True).atoms,
                      ((F(1, 4), F(0)), (F(1, 2), F(1, 2)), (F(1, 4), F(1)))),
        PinnedExample("generalized_jensen k=2 x^3", lambda: generalized_jensen(cube, k2), F(3, 16)),
        PinnedExample("def2_rhs x^3 c=3/4", lambda: def2_rhs(cube, F(3, 4), half), F(5, 16)),
        PinnedExample("def2_rhs x^3 c=1", lambda: def2_rhs(cube, F(1), half), F(3, 8)),
        PinnedExample("def2_rhs_alt x^3 c=3/4", lambda: def2_rhs_alt(cube, F(3, 4), half), F(5, 16)),
        PinnedExample("check_def2 slack x=(1/2,1) C=27/16", lambda: check_def2(cube, upper_half).slack,
                      F(-3, 256)),
        PinnedExample("check_def2 slack x=(1/2,1) C=3/2", lambda: check_def2(sharp, upper_half).slack, F(0)),
        PinnedExample("lemma5_rhs k=2 c=1", lambda: lemma5_rhs(cube, F(1), k2), F(3, 16)),
        PinnedExample("check_lemma5 k=2 c=1/2", lambda: check_lemma5(cube, k2, c_override=F(1, 2)).slack,
                      F(1, 16)),
        PinnedExample("check_lemma5 k=2 c=1", lambda: check_lemma5(sharp, k2).slack, F(0)),
        PinnedExample("threshold x=(1/2,1)", lambda: feasibility_threshold(cube, upper_half), F(3, 2)),
        PinnedExample("threshold x=(0,1)", lambda: feasibility_threshold(cube, half), F(1)),
        PinnedExample("estimate_certificate x^3 x_bar=1/2",
                      lambda: estimate_certificate(cube, F(1, 2), trials=20, rng_seed=1).c_sup_estimate, F(1)),
        PinnedExample("estimate_certificate x^3 x_bar=3/4",
                      lambda: estimate_certificate(cube, F(3, 4), trials=20, rng_seed=1).c_sup_estimate, F(3, 2)),
        PinnedExample("ratio_extrema k=1", lambda: extrema(ratio_extrema(k1r)), (F(2, 3), F(2))),
        PinnedExample("ratio_extrema k=2 (0.3,0.7)/(0.5,0.5)", lambda: extrema(ratio_extrema(k2r)),
                      (F(9, 25), F(49, 25))),
        PinnedExample("replicated k=2 extrema",
                      lambda: extrema(ratio_extrema(replicate_instance(p_half, x01, p_half, r_q))),
                      (F(4, 9), F(4))),
        PinnedExample("theorem6 lower slack C=3x^2", lambda: theorem6_lower_check(cube, k1r).slack, F(1, 32)),
        PinnedExample("theorem6 lower slack C=2x", lambda: theorem6_lower_check(sharp, k1r).slack, F(0)),
        PinnedExample("theorem6 upper slack C=2x", lambda: theorem6_upper_check(sharp, k1r).slack, F(0)),
        PinnedExample("theorem6 upper slack C=3x^2", lambda: theorem6_upper_check(cube, k1r).slack, F(-3, 128)),
        PinnedExample("corollary8 lower slack C=3x^2",
                      lambda: corollary8_check(cube, x01, p_half, r_q, "lower").slack, F(1, 32)),
        PinnedExample("corollary8 upper slack C=3x^2",
                      lambda: corollary8_check(cube, x01, p_half, r_q, "upper").slack, F(-3, 128)),
        PinnedExample("corollary8 upper slack C=2x",
                      lambda: corollary8_check(sharp, x01, p_half, r_q, "upper").slack, F(0)),
    ]


PINNED_EXAMPLES: List[PinnedExample] = _pinned()


def run_selftest(examples: Optional[Sequence[PinnedExample]] = None) -> Tuple[List[str], float]:
    """Evaluate the pinned table; returns the failing example names and the elapsed seconds."""
    examples = PINNED_EXAMPLES if examples is None else examples
    start = time.perf_counter()
    failures = []
    for ex in examples:
        try:
            got = ex.compute()
        except Exception as exc:  # report, don't abort the table
            failures.append(f"{ex.name}: raised {exc!r}")
            continue
        if got != ex.expected or _has_float(got):
            failures.append(f"{ex.name}: expected {ex.expected!r}, got {got!r}")
    return failures, time.perf_counter() - start


def _has_float(value: Any) -> bool:
    if isinstance(value, float):
        return True
    if isinstance(value, tuple):
        return any(_has_float(v) for v in value)
    return False
