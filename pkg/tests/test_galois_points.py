import pytest

from errors import DegenerateWeight, DimensionMismatch, IndexOutOfRange, InvalidPartition, WeightNotRestricted
from galois_points import (
    crystalline_lift_eval, eval_fbar, fail_example_points, glob_func_restriction, is_supersingular,
    levi_image, ordinary_point, psi_bar_eval, reassemble_levi, same_semisimplification, specialize,
    stratum_label, torus_eval,
)
from hecke import ModPHeckeElt, satake_generators
from scalars import Q, SymbolicScalar, frob_var
from tame_types import serre_weight

t1, t2, t3 = (frob_var(i) for i in (1, 2, 3))


@pytest.fixture
def sigma():
    return serre_weight(11, 1, 3, [(4, 2, 0)])


@pytest.fixture
def point(sigma):
    return ordinary_point(sigma)


def test_characters_of_the_point(point):
    assert [chi.exponents for chi in point.characters] == [(4,), (1,), (-2,)]
    assert point.frob_values() == [SymbolicScalar(t, point.context) for t in (t1, t2, t3)]


def test_eval_fbar(sigma, point):
    assert eval_fbar(sigma, 2, point) == SymbolicScalar(t1 * t2, point.context)
    with pytest.raises(IndexOutOfRange):
        eval_fbar(sigma, 4, point)


def test_psi_bar_sends_y_to_fbar(sigma, point):
    ys = satake_generators(3, 11)
    for i, y in enumerate(ys, start=1):
        assert psi_bar_eval(sigma, y, point) == eval_fbar(sigma, i, point)
    assert psi_bar_eval(sigma, ys[0] * ys[1], point) == SymbolicScalar(t1 ** 2 * t2, point.context)


def test_torus_eval(point):
    assert torus_eval(point, "x1*x3 + q*x2") == SymbolicScalar(t1 * t3 + Q * t2, point.context)


def test_strata(sigma, point):
    assert stratum_label(sigma, point) == (1, 2)
    low = specialize(point, {'t2': 'pi'})
    assert stratum_label(sigma, low) == (1,)
    assert is_supersingular(sigma, specialize(point, {'t1': 'pi'}))


def test_lift_and_restriction_agree(sigma, point):
    ctx = point.context
    assert crystalline_lift_eval(sigma, [1, 2]) == SymbolicScalar(frob_var(1, True) * frob_var(2, True), ctx)
    assert glob_func_restriction(sigma, [1, 2], point) == eval_fbar(sigma, 2, point)
    assert glob_func_restriction(sigma, [1], point) == eval_fbar(sigma, 1, point)
    assert glob_func_restriction(sigma, [2], point).is_zero()
    assert glob_func_restriction(sigma, [1, 3], point).is_zero()


def test_levi_round_trip(sigma, point):
    blocks = levi_image(sigma, point, [1])
    assert [b.n for b, _ in blocks] == [1, 2]
    assert blocks[0][0].lambda_1.entries == ((4,),)
    assert blocks[1][0].lambda_1.entries == ((1, -1),)
    assert reassemble_levi(blocks) == point
    with pytest.raises(InvalidPartition):
        levi_image(sigma, point, [3])


def test_levi_blocks_are_ordinary_points(sigma, point):
    block_sigma, block_point = levi_image(sigma, point, [1])[1]
    assert ordinary_point(block_sigma, ["t2", "t3"]) == block_point
    assert [chi.exponents for chi in block_point.characters] == [(1,), (-2,)]


def test_levi_borel_keeps_characters(sigma, point):
    blocks = levi_image(sigma, point, [1, 2])
    assert [b.lambda_1.entries for b, _ in blocks] == [((4,),), ((1,),), ((-2,),)]
    assert [bp.characters[0] for _, bp in blocks] == list(point.characters)
    assert levi_image(sigma, point, [])[0] == (sigma, point)


def test_reassembly_rejects_unrestricted_gap():
    low = serre_weight(11, 1, 1, [(0,)])
    high = serre_weight(11, 1, 1, [(5,)])
    blocks = [(low, ordinary_point(low, ["t1"])), (high, ordinary_point(high, ["t2"]))]
    with pytest.raises(WeightNotRestricted):
        reassemble_levi(blocks)


def test_levi_needs_the_stratum(sigma, point):
    with pytest.raises(DegenerateWeight):
        levi_image(sigma, specialize(point, {'t1': 'pi'}), [1])


def test_degenerate_weight():
    with pytest.raises(DegenerateWeight):
        ordinary_point(serre_weight(7, 1, 2, [(0, 0)]))


def test_fail_example():
    sigma = serre_weight(7, 1, 2, [(5, 0)])
    x, y = fail_example_points(sigma, 1)
    assert same_semisimplification(x, y)
    assert eval_fbar(sigma, 1, x) != eval_fbar(sigma, 1, y)
    with pytest.raises(DegenerateWeight):
        fail_example_points(serre_weight(7, 1, 2, [(4, 0)]), 1)


def test_point_dimension_checks(sigma):
    with pytest.raises(DimensionMismatch):
        ordinary_point(sigma, ["t1", "t2"])
    with pytest.raises(DimensionMismatch):
        ModPHeckeElt(3, 11, {(1, 0): 1})
