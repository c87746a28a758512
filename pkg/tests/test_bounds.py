from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from terzatic import (
    GeneralInstance,
    Polynomial,
    ValidationError,
    Verdict,
    corollary7_check,
    corollary8_check,
    cube_sharp_certificate,
    make_weights,
    power,
    ratio_extrema,
    replicate_instance,
    theorem6_lower_check,
    theorem6_upper_check,
)
from terzatic.core import PointVector
from terzatic.oracle import brute_ratio_extrema

from strategies import rational_general

cube = power(3)
sharp = cube.with_certificate(cube_sharp_certificate())
k1r = GeneralInstance.of([1], [(["1/2", "1/2"], [0, 1])], r_blocks=[["1/4", "3/4"]])
x01 = PointVector((F(0), F(1)))
p_half = make_weights([1, 1])
r_q = make_weights([1, 3])


def test_ratio_extrema_examples():
    e = ratio_extrema(k1r)
    assert (e.m, e.M) == (F(2, 3), F(2))
    assert (e.argmin, e.argmax) == ((2,), (1,))
    g = GeneralInstance.of(["1/2", "1/2"], [(["3/10", "7/10"], [0, 1])] * 2, r_blocks=[["1/2", "1/2"]] * 2)
    e = ratio_extrema(g)
    assert (e.m, e.M) == (F(9, 25), F(49, 25))
    assert e.argmin == (1, 1)


def test_ratio_extrema_needs_r():
    with pytest.raises(ValidationError):
        ratio_extrema(GeneralInstance.of([1], [([1], [0])]))


@settings(max_examples=60)
@given(rational_general(with_r=True))
def test_factored_extrema_match_brute_force(g):
    fast, slow = ratio_extrema(g), brute_ratio_extrema(g)
    assert (fast.m, fast.M) == (slow.m, slow.M)
    assert fast.m <= 1 <= fast.M


def test_theorem6_examples():
    assert theorem6_lower_check(cube, k1r).slack == F(1, 32)
    assert theorem6_lower_check(sharp, k1r).slack == 0
    assert theorem6_upper_check(sharp, k1r).slack == 0
    upper = theorem6_upper_check(cube, k1r)
    assert upper.slack == F(-3, 128)
    assert upper.verdict is Verdict.VIOLATED
    assert upper.c_used == 3 * F(3, 4) ** 2


@settings(max_examples=40)
@given(rational_general(with_r=True))
def test_theorem6_sharp_certificate_is_tight(g):
    lower = theorem6_lower_check(sharp, g, literal=True)
    upper = theorem6_upper_check(sharp, g, literal=True)
    assert lower.slack == 0
    assert upper.slack == 0
    assert lower.c_used == 2 * lower.barycenter
    assert upper.c_used == 2 * upper.barycenter_r


@settings(max_examples=40)
@given(rational_general(max_k=1, with_r=True))
def test_corollary8_equals_theorem6_at_k1(g):
    b, r = g.blocks[0], g.r_blocks[0]
    for side, check in (("lower", theorem6_lower_check), ("upper", theorem6_upper_check)):
        a = corollary8_check(cube, b.x, b.p, r, side)
        t = check(cube, g)
        assert (a.lhs, a.rhs, a.slack, a.verdict) == (t.lhs, t.rhs, t.slack, t.verdict)


def test_corollary8_examples():
    assert corollary8_check(cube, x01, p_half, r_q, "lower").slack == F(1, 32)
    assert corollary8_check(cube, x01, p_half, r_q, "upper").slack == F(-3, 128)
    assert corollary8_check(sharp, x01, p_half, r_q, "upper").slack == 0
    with pytest.raises(ValidationError):
        corollary8_check(cube, x01, p_half, r_q, "middle")
    with pytest.raises(ValidationError):
        corollary8_check(cube, x01, make_weights([1]), r_q, "lower")


@pytest.mark.parametrize("k", [1, 2, 3])
def test_replicated_extrema_are_powers(k):
    q = make_weights([1] * k)
    g = replicate_instance(p_half, x01, q, r_q)
    e = ratio_extrema(g)
    assert (e.m, e.M) == (F(2, 3) ** k, F(2) ** k)


def test_corollary7_delegates_to_theorem6():
    q = make_weights([1, 2])
    g = replicate_instance(p_half, x01, q, r_q)
    for side, check in (("lower", theorem6_lower_check), ("upper", theorem6_upper_check)):
        assert corollary7_check(sharp, x01, p_half, r_q, q, side) == check(sharp, g)


def test_float_theorem6_within_tolerance():
    g = GeneralInstance.of([0.4, 0.6], [([0.3, 0.7], [0.1, 0.8]), ([0.5, 0.5], [0.2, 0.9])],
                           r_blocks=[[0.6, 0.4], [0.2, 0.8]])
    report = theorem6_lower_check(cube.with_certificate(Polynomial((0.0, 2.0))), g, literal=True)
    assert abs(report.slack) <= 1e-12
    assert report.holds


def test_brute_extrema_float_mode():
    g = GeneralInstance.of([0.5, 0.5], [([0.3, 0.7], [0.0, 1.0])] * 2, r_blocks=[[0.5, 0.5]] * 2)
    fast, slow = ratio_extrema(g), brute_ratio_extrema(g)
    assert slow.m == pytest.approx(fast.m) and slow.M == pytest.approx(fast.M)
    assert (slow.argmin, slow.argmax) == ((1, 1), (2, 2))
