"""Bounds comparing the Jensen functional under two weight families.

With ``m`` and ``M`` the smallest and largest ratio of p-tensor to
r-tensor weights, both differences ``J(p) - m J(r)`` and
``M J(r) - J(p)`` are bounded below by tensor sums of the superterzatic
bracket.  The replicated-block and single-block specializations are here too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Tuple, Union

from .core import (
    Block,
    FunctionModel,
    GeneralInstance,
    PointVector,
    Scalar,
    SimpleInstance,
    TerzaticError,
    ValidationError,
    Weights,
    general_barycenter,
    mprod,
    msum,
    multi_indices,
    terza_quotient,
)
from .functional import generalized_jensen, jensen
from .superterzatic import (
    CheckReport,
    Direction,
    _all_equal,
    default_rel_tol,
    make_report,
    resolve_certificate,
    resolve_direction,
)


class ConsistencyError(TerzaticError):
    """Two evaluation routes of the same quantity disagreed."""


@dataclass(frozen=True)
class RatioExtrema:
    m: Scalar
    M: Scalar
    argmin: Tuple[int, ...]
    argmax: Tuple[int, ...]


def _require_r(ginst: GeneralInstance) -> Tuple[Weights, ...]:
    if ginst.r_blocks is None:
        raise ValidationError("this check needs r weights (r_blocks)", "r_blocks")
    return ginst.r_blocks


def ratio_extrema(ginst: GeneralInstance) -> RatioExtrema:
    """Extremes of ``prod_i p_{i j_i} / r_{i j_i}`` over all multi-indices.

    All factors are positive and vary independently, so the extremes are
    products of per-block extremes.  Ties go to the smallest index.
    """
    r_blocks = _require_r(ginst)
    mode = ginst.mode
    mins, maxs, argmin, argmax = [], [], [], []
    for b, r in zip(ginst.blocks, r_blocks):
        ratios = [p / w for p, w in zip(b.p, r)]
        lo = min(ratios)
        hi = max(ratios)
        mins.append(lo)
        maxs.append(hi)
        argmin.append(ratios.index(lo) + 1)
        argmax.append(ratios.index(hi) + 1)
    return RatioExtrema(mprod(mins, mode), mprod(maxs, mode), tuple(argmin), tuple(argmax))


def _joint_atoms(ginst: GeneralInstance, cap: Optional[int]) -> List[Tuple[Scalar, Scalar, Scalar]]:
    """``(prod p, prod r, S)`` for every multi-index."""
    mode = ginst.mode
    r_blocks = _require_r(ginst)
    atoms = []
    for idx in multi_indices(*ginst.sizes, cap=cap):
        pp = mprod((ginst.blocks[i].p[j - 1] for i, j in enumerate(idx)), mode)
        rr = mprod((r_blocks[i][j - 1] for i, j in enumerate(idx)), mode)
        s = msum((ginst.q[i] * ginst.blocks[i].x[j - 1] for i, j in enumerate(idx)), mode)
        atoms.append((pp, rr, s))
    return atoms


def _bracket(f: Callable, s: Scalar, centre: Scalar, c: Scalar) -> Scalar:
    return (s - centre) * c + terza_quotient(f, s - centre)


def _literal_shift(ginst: GeneralInstance, sign: int) -> Scalar:
    """Nested sum ``sum_i q_i sum_j (r_ij - p_ij) x_ij`` (``sign=1``) or its negative."""
    mode = ginst.mode
    return msum((qi * msum((sign * (r - p) * x for p, r, x in zip(b.p, rw, b.x)), mode)
                 for qi, b, rw in zip(ginst.q, ginst.blocks, ginst.r_blocks)), mode)


def _assert_same(a: Scalar, b: Scalar, what: str) -> None:
    if isinstance(a, float) or isinstance(b, float):
        ok = math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-15)
    else:
        ok = a == b
    if not ok:
        raise ConsistencyError(f"{what}: compact form {a!r} != nested form {b!r}")


def theorem6_lower_check(f: FunctionModel, ginst: GeneralInstance, c_at: Optional[Callable] = None,
                         c_override: Any = None, *, direction: Union[Direction, str, None] = None,
                         rel_tol: Optional[float] = None, cap: Optional[int] = None,
                         literal: bool = False) -> CheckReport:
    """Check ``J(p) - m J(r) >= RHS`` with the certificate evaluated at ``x_bar``.

    ``literal=True`` also evaluates the trailing term from its nested-sum
    form and raises :class:`ConsistencyError` on disagreement.
    """
    mode = ginst.mode
    direction = resolve_direction(f, direction)
    ext = ratio_extrema(ginst)
    m = ext.m
    xb = general_barycenter(ginst, "p")
    xr = general_barycenter(ginst, "r")
    c = resolve_certificate(f, xb, mode, c_at, c_override)

    lhs = generalized_jensen(f, ginst, "p", cap=cap) - m * generalized_jensen(f, ginst, "r", cap=cap)
    first = msum(((pp - m * rr) * s * _bracket(f, s, xb, c) for pp, rr, s in _joint_atoms(ginst, cap)), mode)
    second = m * xr * _bracket(f, xr, xb, c)
    if literal:
        shift = _literal_shift(ginst, 1)
        _assert_same(shift, xr - xb, "r-minus-p shift")
        nested = m * xr * (shift * c + terza_quotient(f, shift))
        _assert_same(second, nested, "lower trailing term")
    return make_report(lhs, first + second, mode=mode, direction=direction,
                       rel_tol=default_rel_tol(f, mode, rel_tol),
                       degenerate=_all_equal(ginst.points()), c_used=c, x_bar=xb, x_check=xr,
                       instance=ginst)


def theorem6_upper_check(f: FunctionModel, ginst: GeneralInstance, c_at: Optional[Callable] = None,
                         c_override: Any = None, *, direction: Union[Direction, str, None] = None,
                         rel_tol: Optional[float] = None, cap: Optional[int] = None,
                         literal: bool = False) -> CheckReport:
    """Check ``M J(r) - J(p) >= RHS`` with the certificate evaluated at ``x_check``."""
    mode = ginst.mode
    direction = resolve_direction(f, direction)
    M = ratio_extrema(ginst).M
    xb = general_barycenter(ginst, "p")
    xr = general_barycenter(ginst, "r")
    c = resolve_certificate(f, xr, mode, c_at, c_override)

    lhs = M * generalized_jensen(f, ginst, "r", cap=cap) - generalized_jensen(f, ginst, "p", cap=cap)
    first = msum(((M * rr - pp) * s * _bracket(f, s, xr, c) for pp, rr, s in _joint_atoms(ginst, cap)), mode)
    second = xb * _bracket(f, xb, xr, c)
    if literal:
        shift = _literal_shift(ginst, -1)
        _assert_same(shift, xb - xr, "p-minus-r shift")
        nested = xb * (shift * c + terza_quotient(f, shift))
        _assert_same(second, nested, "upper trailing term")
    return make_report(lhs, first + second, mode=mode, direction=direction,
                       rel_tol=default_rel_tol(f, mode, rel_tol),
                       degenerate=_all_equal(ginst.points()), c_used=c, x_bar=xb, x_check=xr,
                       instance=ginst)


def replicate_instance(p: Weights, x: PointVector, q: Weights, r: Optional[Weights] = None) -> GeneralInstance:
    """``len(q)`` identical blocks ``(p, x)``, with ``r`` replicated alongside when given."""
    k = len(q)
    blocks = tuple(Block(p, x) for _ in range(k))
    return GeneralInstance(q, blocks, None if r is None else tuple(r for _ in range(k)))


def corollary7_check(f: FunctionModel, x: PointVector, p: Weights, r: Weights, q: Weights,
                     side: str, c_at: Optional[Callable] = None, c_override: Any = None,
                     **kwargs) -> CheckReport:
    ginst = replicate_instance(p, x, q, r)
    check = theorem6_lower_check if side == "lower" else theorem6_upper_check
    return check(f, ginst, c_at, c_override, **kwargs)


def corollary8_check(f: FunctionModel, x: PointVector, p: Weights, r: Weights, side: str,
                     c_at: Optional[Callable] = None, c_override: Any = None, *,
                     direction: Union[Direction, str, None] = None,
                     rel_tol: Optional[float] = None) -> CheckReport:
    """Single-block version of both bounds, evaluated term by term without tensor enumeration."""
    if not len(x) == len(p) == len(r):
        raise ValidationError(f"lengths differ: x={len(x)}, p={len(p)}, r={len(r)}")
    if side not in ("lower", "upper"):
        raise ValidationError(f"side must be 'lower' or 'upper', got {side!r}", "side")
    inst_p = SimpleInstance(p, x)
    inst_r = SimpleInstance(r, x)
    mode = inst_p.mode
    direction = resolve_direction(f, direction)
    ratios = [a / b for a, b in zip(p, r)]
    xb = msum((a * t for a, t in zip(p, x)), mode)
    xr = msum((b * t for b, t in zip(r, x)), mode)

    if side == "lower":
        m = min(ratios)
        c = resolve_certificate(f, xb, mode, c_at, c_override)
        lhs = jensen(f, inst_p) - m * jensen(f, inst_r)
        shift = msum(((b - a) * t for a, b, t in zip(p, r, x)), mode)
        rhs = (msum(((a - m * b) * t * ((t - xb) * c + terza_quotient(f, t - xb))
                     for a, b, t in zip(p, r, x)), mode)
               + m * xr * (shift * c + terza_quotient(f, shift)))
    else:
        M = max(ratios)
        c = resolve_certificate(f, xr, mode, c_at, c_override)
        lhs = M * jensen(f, inst_r) - jensen(f, inst_p)
        shift = msum(((a - b) * t for a, b, t in zip(p, r, x)), mode)
        rhs = (msum(((M * b - a) * t * ((t - xr) * c + terza_quotient(f, t - xr))
                     for a, b, t in zip(p, r, x)), mode)
               + xb * (shift * c + terza_quotient(f, shift)))
    return make_report(lhs, rhs, mode=mode, direction=direction,
                       rel_tol=default_rel_tol(f, mode, rel_tol),
                       degenerate=_all_equal(x), c_used=c, x_bar=xb, x_check=xr,
                       instance=inst_p.as_general(r))
