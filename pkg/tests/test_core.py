from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from terzatic import (
    DomainError,
    EnumerationCapError,
    ExactnessError,
    GeneralInstance,
    Mode,
    PointVector,
    SimpleInstance,
    ValidationError,
    Weights,
    barycenter,
    cube_log,
    general_barycenter,
    linear_combination,
    make_weights,
    multi_indices,
    polynomial,
    power,
    terza_quotient,
)
from terzatic.core import ModeError, convert_instance, derive_subseed, msum

from strategies import rational_simple


@pytest.mark.parametrize("raw, expected", [
    ([1], (F(1),)),
    ([2, 2], (F(1, 2), F(1, 2))),
    ([1, 3], (F(1, 4), F(3, 4))),
])
def test_make_weights_examples(raw, expected):
    assert make_weights(raw).w == expected


@pytest.mark.parametrize("raw", [[], [1, 0], [2, -1]])
def test_make_weights_rejects(raw):
    with pytest.raises(ValidationError):
        make_weights(raw)


@given(st.lists(st.integers(1, 1000), min_size=1, max_size=8))
def test_make_weights_sums_to_one_and_is_idempotent(raw):
    w = make_weights(raw)
    assert sum(w) == 1
    assert make_weights(w.w) == w


@given(st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=8))
def test_make_weights_float_within_tolerance(raw):
    w = make_weights(raw)
    assert w.mode is Mode.FLOAT
    assert abs(msum(w, Mode.FLOAT) - 1) <= 1e-12


def test_weights_must_sum_to_one():
    with pytest.raises(ValidationError):
        Weights((F(1, 2), F(1, 3)))
    with pytest.raises(ValidationError):
        Weights((0.5, 0.5 + 1e-9))
    Weights((0.5, 0.5 + 1e-13))


def test_modes_do_not_mix():
    with pytest.raises(ModeError):
        SimpleInstance(make_weights([1, 1]), PointVector((0.0, 1.0)))


def test_points_must_lie_in_domain():
    with pytest.raises(DomainError):
        PointVector((F(0), F(3, 2)))
    PointVector((F(0), F(3, 2)), domain_upper=2)
    with pytest.raises(ValidationError):
        PointVector((F(0),), domain_upper=0)


@pytest.mark.parametrize("p, x, expected", [
    (["1/2", "1/2"], [0, 1], F(1, 2)),
    (["1/4", "3/4"], [0, 1], F(3, 4)),
    ([1], ["2/7"], F(2, 7)),
])
def test_barycenter(p, x, expected):
    assert barycenter(SimpleInstance.of(p, x)) == expected


def test_general_barycenter():
    g = GeneralInstance.of(["1/2", "1/2"], [(["1/2", "1/2"], [0, 1])] * 2)
    assert general_barycenter(g, "p") == F(1, 2)
    single = GeneralInstance.of([1], [(["1/4", "3/4"], [0, 1])])
    assert general_barycenter(single) == barycenter(SimpleInstance.of(["1/4", "3/4"], [0, 1]))
    same = GeneralInstance.of(["1/3", "2/3"], [(["1/2", "1/2"], ["2/5", "2/5"]), ([1], ["2/5"])])
    assert general_barycenter(same) == F(2, 5)
    with pytest.raises(ValidationError):
        general_barycenter(g, "r")


def test_general_instance_validation_paths():
    with pytest.raises(ValidationError) as exc:
        GeneralInstance.of(["1/2", "1/2"], [(["1/2", "1/2"], [0, 1])], )
    assert exc.value.path == "q"
    with pytest.raises(ValidationError) as exc:
        GeneralInstance.of([1], [(["1/2", "1/2"], [0, 1])], r_blocks=[[1]])
    assert exc.value.path == "r_blocks[0]"


@given(rational_simple())
def test_deviations_cancel_exactly(inst):
    xb = barycenter(inst)
    assert sum(p * (x - xb) for p, x in zip(inst.p, inst.x)) == 0


@pytest.mark.parametrize("d, expected", [(F(0), F(0)), (F(1, 2), F(1, 4)), (F(-1, 4), F(1, 16))])
def test_terza_quotient_cube(d, expected):
    assert terza_quotient(power(3), d) == expected


def test_terza_quotient_domain():
    with pytest.raises(DomainError):
        terza_quotient(power(3), F(-2), domain_upper=1)


@pytest.mark.parametrize("f", [power(3), power(4), power(3.5), cube_log()])
@pytest.mark.parametrize("d", [1e-6, 1e-9, -1e-6, -1e-9])
def test_terza_quotient_vanishes_near_zero(f, d):
    assert abs(terza_quotient(f, d)) < 1e-8
    assert terza_quotient(f, 0.0) == 0.0


def test_function_models():
    assert power(3)(F(1, 2)) == F(1, 8)
    assert power(3).certificate(F(1, 2)) == F(3, 4)
    assert power(5).certificate(F(1, 2)) == 5 * F(1, 16)
    assert power(3.5)(0.25) == pytest.approx(0.25 ** 3.5)
    assert power(3.5).certificate(0.25) == pytest.approx(3.5 * 0.25 ** 2.5)
    g = cube_log()
    assert g(0.0) == 0.0
    assert g(0.5) == pytest.approx(0.125 * 0.6931471805599453)
    assert g.claim.value == "subterzatic"
    with pytest.raises(ExactnessError):
        g(F(1, 2))
    with pytest.raises(ExactnessError):
        power(3.5)(F(1, 2))
    with pytest.raises(ValidationError):
        power(2)
    with pytest.raises(DomainError):
        power(3)(-0.5)
    assert polynomial([1, 0, 2])(F(1, 2)) == F(3, 2)


def test_linear_combination_certificate_is_combined():
    f = linear_combination([(2, power(3)), (1, power(4))])
    t = F(1, 3)
    assert f(t) == 2 * t ** 3 + t ** 4
    assert f.certificate(t) == 2 * 3 * t ** 2 + 4 * t ** 3
    assert f.claim.value == "superterzatic"
    with pytest.raises(ValidationError):
        linear_combination([(0, power(3))])
    assert linear_combination([(1, power(3)), (1, cube_log())]).certificate is None


def test_multi_indices():
    assert list(multi_indices(2)) == [(1,), (2,)]
    assert list(multi_indices(2, 2)) == [(1, 1), (1, 2), (2, 1), (2, 2)]
    with pytest.raises(EnumerationCapError) as exc:
        multi_indices(10**4, 10**4, cap=10**7)
    assert exc.value.count == 10**8


def test_multi_indices_cap_env(monkeypatch):
    monkeypatch.setenv("TERZATIC_CAP", "3")
    with pytest.raises(EnumerationCapError):
        multi_indices(2, 2)
    assert len(list(multi_indices(3))) == 3


@given(st.lists(st.integers(1, 4), min_size=1, max_size=4))
def test_multi_indices_count(sizes):
    tuples = list(multi_indices(*sizes))
    assert len(set(tuples)) == len(tuples)
    n = 1
    for s in sizes:
        n *= s
    assert len(tuples) == n
    assert tuples == sorted(tuples)


def test_convert_instance_roundtrip_modes():
    inst = SimpleInstance.of(["1/3", "2/3"], ["1/5", 1])
    fl = convert_instance(inst, Mode.FLOAT)
    assert fl.mode is Mode.FLOAT
    assert barycenter(fl) == pytest.approx(float(barycenter(inst)))
    back = convert_instance(fl, Mode.RATIONAL)
    assert sum(back.p) == 1


def test_subseed_is_stable():
    assert derive_subseed(7, 3) == derive_subseed(7, 3)
    assert derive_subseed(7, 3) != derive_subseed(7, 4)
    assert 0 <= derive_subseed(0, 0) < 2**64
