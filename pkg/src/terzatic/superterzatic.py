"""The superterzatic lower bound on the Jensen functional, its tensor form,
per-instance feasibility thresholds and certificate estimation."""
from __future__ import annotations

import enum
import math
import random
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional, Tuple, Union

from .core import (
    Claim,
    FunctionModel,
    GeneralInstance,
    MissingCertificateError,
    Mode,
    PointVector,
    Scalar,
    SimpleInstance,
    ValidationError,
    Weights,
    barycenter,
    derive_subseed,
    general_barycenter,
    msum,
    terza_quotient,
    to_scalar,
)
from .functional import generalized_jensen, jensen, tensor_distribution


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    DEGENERATE = "degenerate"


class Direction(str, enum.Enum):
    SUPER = "super"
    SUB = "sub"


@dataclass(frozen=True)
class CheckReport:
    lhs: Scalar
    rhs: Scalar
    slack: Scalar
    verdict: Verdict
    tolerance: Scalar
    c_used: Scalar
    barycenter: Scalar
    direction: Direction = Direction.SUPER
    barycenter_r: Optional[Scalar] = None
    instance: Any = None

    @property
    def holds(self) -> bool:
        return self.verdict is not Verdict.VIOLATED


def resolve_direction(f: FunctionModel, direction: Union[Direction, str, None]) -> Direction:
    if direction is None:
        return Direction.SUB if f.claim is Claim.SUB else Direction.SUPER
    return Direction(direction)


def resolve_certificate(f: FunctionModel, point: Scalar, mode: Mode,
                        c_at: Optional[Callable[[Scalar], Scalar]] = None,
                        c_override: Any = None) -> Scalar:
    """``C`` to use at ``point``: explicit override, then ``c_at``, then the model's certificate."""
    if c_override is not None:
        return to_scalar(c_override, mode)
    cert = c_at if c_at is not None else f.certificate
    if cert is None:
        raise MissingCertificateError(f"no certificate for {f.describe()} and no override given")
    return to_scalar(cert(point), mode)


def tolerance_for(lhs: Scalar, rhs: Scalar, mode: Mode, rel_tol: Optional[float]) -> Scalar:
    """Absolute tolerance: ``rel_tol * max(|lhs|, |rhs|, 1)``; exact zero by default for rationals."""
    if mode is Mode.RATIONAL:
        if not rel_tol:
            return Fraction(0)
        return Fraction(rel_tol) * max(abs(lhs), abs(rhs), Fraction(1))
    return float(rel_tol) * max(abs(lhs), abs(rhs), 1.0)


def make_report(lhs: Scalar, rhs: Scalar, *, mode: Mode, direction: Direction, rel_tol: Optional[float],
                degenerate: bool, c_used: Scalar, x_bar: Scalar, x_check: Optional[Scalar] = None,
                instance: Any = None) -> CheckReport:
    slack = lhs - rhs if direction is Direction.SUPER else rhs - lhs
    tol = tolerance_for(lhs, rhs, mode, rel_tol)
    if degenerate:
        verdict = Verdict.DEGENERATE
    elif slack >= -tol:
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.VIOLATED
    return CheckReport(lhs, rhs, slack, verdict, tol, c_used, x_bar, direction, x_check, instance)


def default_rel_tol(f: FunctionModel, mode: Mode, rel_tol: Optional[float]) -> Optional[float]:
    if rel_tol is not None:
        return rel_tol
    return None if mode is Mode.RATIONAL else f.default_rel_tol


def _all_equal(values) -> bool:
    values = list(values)
    return all(v == values[0] for v in values)


# ---------------------------------------------------------------------------
# single-block inequality


def def2_rhs(f: Callable[[Scalar], Scalar], c: Scalar, inst: SimpleInstance) -> Scalar:
    """``sum p_i x_i [(x_i - x_bar) c + f(|x_i - x_bar|)/|x_i - x_bar|]``."""
    mode = inst.mode
    c = to_scalar(c, mode)
    xb = barycenter(inst)
    return msum((p * x * ((x - xb) * c + terza_quotient(f, x - xb)) for p, x in zip(inst.p, inst.x)), mode)


def def2_rhs_alt(f: Callable[[Scalar], Scalar], c: Scalar, inst: SimpleInstance) -> Scalar:
    """Same bound rewritten as ``c sum p_i (x_i - x_bar)^2 + sum p_i x_i f(|x_i - x_bar|)/|x_i - x_bar|``."""
    mode = inst.mode
    c = to_scalar(c, mode)
    xb = barycenter(inst)
    spread = msum((p * (x - xb) ** 2 for p, x in zip(inst.p, inst.x)), mode)
    tail = msum((p * x * terza_quotient(f, x - xb) for p, x in zip(inst.p, inst.x)), mode)
    return c * spread + tail


def check_def2(f: FunctionModel, inst: SimpleInstance, direction: Union[Direction, str, None] = None,
               c_override: Any = None, *, c_at: Optional[Callable] = None,
               rel_tol: Optional[float] = None) -> CheckReport:
    mode = inst.mode
    direction = resolve_direction(f, direction)
    xb = barycenter(inst)
    c = resolve_certificate(f, xb, mode, c_at, c_override)
    lhs = jensen(f, inst)
    rhs = def2_rhs(f, c, inst)
    return make_report(lhs, rhs, mode=mode, direction=direction,
                       rel_tol=default_rel_tol(f, mode, rel_tol),
                       degenerate=_all_equal(inst.x), c_used=c, x_bar=xb, instance=inst)


# ---------------------------------------------------------------------------
# tensor form


def lemma5_rhs(f: Callable[[Scalar], Scalar], c: Scalar, ginst: GeneralInstance,
               cap: Optional[int] = None) -> Scalar:
    """Tensor-weighted bound ``sum (prod p) S [(S - x_bar) c + f(|S - x_bar|)/|S - x_bar|]``
    with ``S = sum_i q_i x_{i j_i}``."""
    mode = ginst.mode
    c = to_scalar(c, mode)
    xb = general_barycenter(ginst, "p")
    dist = tensor_distribution(ginst, "p", merge=True, cap=cap)
    return msum((w * s * ((s - xb) * c + terza_quotient(f, s - xb)) for w, s in dist.atoms), mode)


def check_lemma5(f: FunctionModel, ginst: GeneralInstance, direction: Union[Direction, str, None] = None,
                 c_override: Any = None, *, c_at: Optional[Callable] = None,
                 rel_tol: Optional[float] = None, cap: Optional[int] = None) -> CheckReport:
    mode = ginst.mode
    direction = resolve_direction(f, direction)
    xb = general_barycenter(ginst, "p")
    c = resolve_certificate(f, xb, mode, c_at, c_override)
    lhs = generalized_jensen(f, ginst, "p", cap=cap)
    rhs = lemma5_rhs(f, c, ginst, cap=cap)
    return make_report(lhs, rhs, mode=mode, direction=direction,
                       rel_tol=default_rel_tol(f, mode, rel_tol),
                       degenerate=_all_equal(ginst.points()), c_used=c, x_bar=xb, instance=ginst)


# ---------------------------------------------------------------------------
# thresholds and certificate estimation


def feasibility_threshold(f: Callable[[Scalar], Scalar], inst: SimpleInstance) -> Union[Scalar, float]:
    """Largest ``C`` for which the single-block bound holds on ``inst``.

    The bound is affine in ``C``: it holds iff ``C <= (J - B) / A`` where
    ``A = sum p (x - x_bar)^2`` and ``B`` is the quotient term.  Returns
    ``math.inf`` when all points coincide (``A = 0``).
    """
    mode = inst.mode
    xb = barycenter(inst)
    spread = msum((p * (x - xb) ** 2 for p, x in zip(inst.p, inst.x)), mode)
    if spread == 0:
        return math.inf
    tail = msum((p * x * terza_quotient(f, x - xb) for p, x in zip(inst.p, inst.x)), mode)
    return (jensen(f, inst) - tail) / spread


_DENOM = 64


def _draw(rng: random.Random, lo: Scalar, hi: Scalar, mode: Mode, open_at_hi: bool) -> Scalar:
    """Point of ``[lo, hi)`` (``open_at_hi``) or ``(lo, hi]``.

    Half the draws are uniform; the rest sit at a log-uniform distance from
    a randomly chosen end, since extreme thresholds occur as points approach
    the interval ends.
    """
    width = hi - lo
    if rng.random() < 0.5:
        if mode is Mode.RATIONAL:
            k = rng.randrange(_DENOM) if open_at_hi else rng.randint(1, _DENOM)
            return lo + width * Fraction(k, _DENOM)
        u = rng.random()
        return lo + width * u if open_at_hi else hi - width * u
    if mode is Mode.RATIONAL:
        dist = width * Fraction(rng.randint(1, _DENOM - 1), _DENOM) / 2 ** rng.randint(0, 20)
    else:
        dist = width * 10.0 ** (-6.0 * (1.0 - rng.random()))
    x = lo + dist if rng.random() < 0.5 else hi - dist
    if x == (hi if open_at_hi else lo) or not lo <= x <= hi:
        return lo + width / 2
    return x


def _positive(rng: random.Random, mode: Mode) -> Scalar:
    if mode is Mode.RATIONAL:
        return Fraction(rng.randint(1, _DENOM), _DENOM)
    return 1.0 - rng.random()


def sample_instance_with_barycenter(x_bar: Any, n: int, rng_seed: int, domain_upper: Any = 1,
                                    mode: Optional[Mode] = None) -> SimpleInstance:
    """Random ``n``-point instance on ``[0, a]`` whose barycenter is exactly ``x_bar``.

    Point 0 lies below ``x_bar``, point 1 above it, and the rest on either
    side.  Each straddling pair
    ``x_i < x_bar < x_j`` has a unique two-point weighting with mean
    ``x_bar``; points equal to ``x_bar`` contribute a point mass.  The
    returned weights are a random positive mixture of these solutions, so
    every weight is strictly positive.
    """
    if mode is None:
        mode = Mode.FLOAT if isinstance(x_bar, float) or isinstance(domain_upper, float) else Mode.RATIONAL
    xb = to_scalar(x_bar, mode)
    a = to_scalar(domain_upper, mode)
    if not 0 < xb < a:
        raise ValidationError(f"x_bar = {xb} must lie strictly inside (0, {a})", "x_bar")
    if n < 2:
        raise ValidationError(f"n = {n} must be >= 2", "n")
    rng = random.Random(rng_seed)
    lo_side = (0 * xb, xb, mode, True)
    hi_side = (xb, a, mode, False)
    xs = [_draw(rng, *lo_side), _draw(rng, *hi_side)]
    for _ in range(n - 2):
        xs.append(_draw(rng, *(lo_side if rng.random() < 0.5 else hi_side)))

    solutions = []
    for i, lo in enumerate(xs):
        if lo == xb:
            sol = [0] * n
            sol[i] = 1
            solutions.append(sol)
            continue
        if lo > xb:
            continue
        for j, hi in enumerate(xs):
            if hi > xb:
                sol = [0] * n
                sol[i] = (hi - xb) / (hi - lo)
                sol[j] = (xb - lo) / (hi - lo)
                solutions.append(sol)
    mix = [_positive(rng, mode) for _ in solutions]
    total = msum(mix, mode)
    p = [msum((m * sol[t] for m, sol in zip(mix, solutions)), mode) / total for t in range(n)]
    return SimpleInstance(Weights(tuple(p), mode), PointVector(tuple(xs), a, mode))


@dataclass(frozen=True)
class CertificateEstimate:
    x_bar: Scalar
    samples: int
    c_sup_estimate: Scalar
    witness: SimpleInstance
    thresholds_summary: Tuple[Scalar, Scalar, Scalar]  # min, median, max
    thresholds: Tuple[Scalar, ...] = ()


def estimate_certificate(f: Callable[[Scalar], Scalar], x_bar: Any, n_range: Tuple[int, int] = (2, 6),
                         trials: int = 100, rng_seed: int = 0, domain_upper: Any = 1,
                         mode: Optional[Mode] = None) -> CertificateEstimate:
    """Estimate the largest feasible ``C(x_bar)`` as the minimum sampled threshold.

    Trial ``t`` uses sub-seed ``derive_subseed(rng_seed, t)``, so a run with
    more trials extends, and never raises, the estimate of a shorter run.
    """
    if trials < 1:
        raise ValidationError(f"trials = {trials} must be >= 1", "trials")
    lo, hi = n_range
    if lo < 2 or hi < lo:
        raise ValidationError(f"invalid n range {n_range}; need 2 <= lo <= hi", "n_range")
    thresholds = []
    best = None
    witness = None
    for t in range(trials):
        sub = derive_subseed(rng_seed, t)
        n = random.Random(sub).randint(lo, hi)
        inst = sample_instance_with_barycenter(x_bar, n, sub, domain_upper, mode)
        thr = feasibility_threshold(f, inst)
        thresholds.append(thr)
        if best is None or thr < best:
            best, witness = thr, inst
    summary = (min(thresholds), statistics.median(thresholds), max(thresholds))
    return CertificateEstimate(to_scalar(x_bar, witness.mode), trials, best, witness, summary,
                              tuple(thresholds))
