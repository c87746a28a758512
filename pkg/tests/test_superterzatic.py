import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from terzatic import (
    MissingCertificateError,
    Polynomial,
    SimpleInstance,
    ValidationError,
    Verdict,
    barycenter,
    check_def2,
    check_lemma5,
    cube_log,
    cube_sharp_certificate,
    def2_rhs,
    def2_rhs_alt,
    estimate_certificate,
    feasibility_threshold,
    jensen,
    lemma5_rhs,
    polynomial,
    power,
    sample_instance_with_barycenter,
)
from terzatic.core import Mode, msum
from terzatic.oracle import brute_def2_rhs, brute_threshold

from strategies import rational_general, rational_simple

cube = power(3)
sharp = cube.with_certificate(cube_sharp_certificate())
half = SimpleInstance.of(["1/2", "1/2"], [0, 1])
upper_half = SimpleInstance.of(["1/2", "1/2"], ["1/2", 1])


def test_def2_examples():
    assert def2_rhs(cube, F(3, 4), half) == F(5, 16)
    assert def2_rhs(cube, 1, half) == F(3, 8)
    assert def2_rhs_alt(cube, F(3, 4), half) == F(5, 16)
    report = check_def2(cube, upper_half)
    assert report.c_used == F(27, 16)
    assert report.slack == F(-3, 256)
    assert report.verdict is Verdict.VIOLATED
    assert check_def2(sharp, upper_half).slack == 0


def test_def2_degenerate_instance():
    report = check_def2(cube, SimpleInstance.of(["1/2", "1/2"], ["1/3", "1/3"]))
    assert report.verdict is Verdict.DEGENERATE
    assert report.slack == 0


def test_missing_certificate():
    with pytest.raises(MissingCertificateError):
        check_def2(polynomial([0, 0, 0, 1]), half)
    assert check_def2(polynomial([0, 0, 0, 1]), half, c_override=1).slack == 0


def test_float_tolerance_and_direction():
    fl = SimpleInstance.of([0.5, 0.5], [0.5, 1.0])
    report = check_def2(cube, fl)
    assert report.tolerance == pytest.approx(1e-9)
    assert report.verdict is Verdict.VIOLATED
    assert check_def2(cube, fl, "sub").verdict is Verdict.HOLDS


@settings(max_examples=80)
@given(rational_simple(), st.integers(0, 8))
def test_cube_identity(inst, c_num):
    c = F(c_num, 4)
    xb = barycenter(inst)
    spread = sum(p * (x - xb) ** 2 for p, x in zip(inst.p, inst.x))
    assert jensen(cube, inst) - def2_rhs(cube, c, inst) == (2 * xb - c) * spread
    assert def2_rhs(cube, c, inst) == def2_rhs_alt(cube, c, inst) == brute_def2_rhs(cube, c, inst)


@settings(max_examples=80)
@given(rational_simple(min_n=2))
def test_threshold_is_twice_barycenter(inst):
    t = feasibility_threshold(cube, inst)
    if all(x == inst.x[0] for x in inst.x):
        assert t == math.inf
    else:
        assert t == 2 * barycenter(inst) == brute_threshold(cube, inst)
        assert check_def2(cube, inst, c_override=t).slack == 0
        assert check_def2(cube, inst, c_override=t + F(1, 100)).verdict is Verdict.VIOLATED


@settings(max_examples=40)
@given(rational_general())
def test_lemma5_sharp_certificate_is_tight(g):
    report = check_lemma5(sharp, g)
    assert report.slack == 0
    assert lemma5_rhs(cube, 2 * report.barycenter, g) == report.lhs


def test_lemma5_examples():
    from terzatic import GeneralInstance
    g = GeneralInstance.of(["1/2", "1/2"], [(["1/2", "1/2"], [0, 1])] * 2)
    assert lemma5_rhs(cube, 1, g) == F(3, 16)
    assert check_lemma5(cube, g, c_override=F(1, 2)).slack == F(1, 16)


@pytest.mark.parametrize("x_bar, n, seed", [(F(1, 2), 2, 0), (F(3, 4), 5, 3), (F(1, 10), 4, 9)])
def test_sampler_hits_barycenter_exactly(x_bar, n, seed):
    inst = sample_instance_with_barycenter(x_bar, n, seed)
    assert inst.n == n
    assert barycenter(inst) == x_bar
    assert min(inst.x) < x_bar < max(inst.x)
    assert sample_instance_with_barycenter(x_bar, n, seed) == inst


@pytest.mark.parametrize("x_bar", [0.05, 0.5, 0.93])
def test_sampler_float(x_bar):
    for seed in range(50):
        inst = sample_instance_with_barycenter(x_bar, 2 + seed % 5, seed)
        assert abs(barycenter(inst) - x_bar) <= 1e-12
        assert all(0 <= x <= 1 for x in inst.x)


@pytest.mark.parametrize("args", [(F(0), 3), (F(1), 3), (F(1, 2), 1)])
def test_sampler_rejects(args):
    with pytest.raises(ValidationError):
        sample_instance_with_barycenter(*args, rng_seed=0)


def test_estimate_certificate_cube():
    assert estimate_certificate(cube, F(1, 2), trials=20, rng_seed=1).c_sup_estimate == 1
    est = estimate_certificate(cube, F(3, 4), trials=20, rng_seed=1)
    assert est.c_sup_estimate == F(3, 2) < 3 * F(3, 4) ** 2
    assert barycenter(est.witness) == F(3, 4)
    assert est.samples == 20
    with pytest.raises(ValidationError):
        estimate_certificate(cube, F(1, 2), trials=0)


def test_estimate_certificate_cube_log_is_deterministic():
    a = estimate_certificate(cube_log(), 0.5, trials=50, rng_seed=4)
    b = estimate_certificate(cube_log(), 0.5, trials=50, rng_seed=4)
    assert a == b
    lo, med, hi = a.thresholds_summary
    assert lo == a.c_sup_estimate <= med <= hi


def test_cube_log_reversed_direction_holds_with_estimated_certificate():
    g = cube_log()
    est = estimate_certificate(g, 0.25, trials=200, rng_seed=2)
    cert = est.thresholds_summary[2] * 1.1
    model = g.with_certificate(Polynomial((cert,)))
    for seed in range(200):
        inst = sample_instance_with_barycenter(0.25, 2 + seed % 4, 10_000 + seed)
        assert check_def2(model, inst, rel_tol=1e-8).holds


def test_float_identity_is_close():
    inst = SimpleInstance.of([0.2, 0.3, 0.5], [0.1, 0.7, 0.4])
    a, b = def2_rhs(cube, 0.3, inst), def2_rhs_alt(cube, 0.3, inst)
    assert a == pytest.approx(b, rel=1e-12)
    assert msum(inst.p, Mode.FLOAT) == pytest.approx(1)


def test_estimate_is_monotone_in_trials():
    g = cube_log()
    estimates = [estimate_certificate(g, 0.4, trials=t, rng_seed=8).c_sup_estimate for t in (5, 20, 80)]
    assert estimates[0] >= estimates[1] >= estimates[2]
    est = estimate_certificate(g, 0.4, trials=80, rng_seed=8)
    assert feasibility_threshold(g, est.witness) == est.c_sup_estimate
