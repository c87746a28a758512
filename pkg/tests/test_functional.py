from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from terzatic import GeneralInstance, Mode, SimpleInstance, generalized_jensen, jensen, power, tensor_distribution
from terzatic.core import general_barycenter
from terzatic.functional import merge_atoms
from terzatic.oracle import brute_generalized_jensen, brute_jensen

from strategies import float_simple, rational_general, rational_simple

cube = power(3)


@pytest.mark.parametrize("p, x, expected", [
    (["1/2", "1/2"], [0, 1], F(3, 8)),
    (["1/4", "3/4"], [0, 1], F(21, 64)),
    ([1], ["1/3"], F(0)),
])
def test_jensen_examples(p, x, expected):
    assert jensen(cube, SimpleInstance.of(p, x)) == expected


@given(rational_simple())
def test_jensen_nonnegative_and_matches_brute(inst):
    value = jensen(cube, inst)
    assert value >= 0
    assert value == brute_jensen(cube, inst)


@given(float_simple())
def test_jensen_float_nonnegative(inst):
    assert jensen(cube, inst) >= -1e-15


def test_tensor_distribution_merges_equal_sums():
    g = GeneralInstance.of(["1/2", "1/2"], [(["1/2", "1/2"], [0, 1])] * 2)
    dist = tensor_distribution(g)
    assert dist.atoms == ((F(1, 4), F(0)), (F(1, 2), F(1, 2)), (F(1, 4), F(1)))
    assert len(tensor_distribution(g, merge=False)) == 4
    assert generalized_jensen(cube, g) == F(3, 16)


def test_merge_atoms_float_groups_near_equal():
    atoms = merge_atoms([(0.25, 0.1 + 0.2), (0.75, 0.3)], Mode.FLOAT)
    assert len(atoms) == 1
    assert atoms[0][0] == pytest.approx(1.0)


@settings(max_examples=60)
@given(rational_general())
def test_distribution_invariants(g):
    dist = tensor_distribution(g)
    assert dist.total_weight == 1
    assert dist.mean() == general_barycenter(g)
    values = [s for _, s in dist.atoms]
    assert len(values) == len(set(values))


@settings(max_examples=60)
@given(rational_general())
def test_generalized_jensen_matches_brute_force(g):
    value = generalized_jensen(cube, g)
    assert value == brute_generalized_jensen(cube, g)
    assert value >= 0


@settings(max_examples=60)
@given(rational_simple())
def test_single_block_reduces_to_jensen(inst):
    g = inst.as_general()
    assert generalized_jensen(cube, g) == jensen(cube, inst)


def test_generalized_jensen_r_family():
    g = GeneralInstance.of([1], [(["1/2", "1/2"], [0, 1])], r_blocks=[["1/4", "3/4"]])
    assert generalized_jensen(cube, g, "r") == F(21, 64)
