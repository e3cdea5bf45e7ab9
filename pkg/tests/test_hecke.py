import pytest
import sympy as sp

from errors import InvalidOrder, NotCentral, NotIntegral, NotSymmetric
from hecke import (
    HeckeElt, LevelData, ModPHeckeElt, T_inverse_scalar, T_orbit_set, conv_TT, galois_dictionary,
    generator, integral_membership, inverse_generator, n_of, parse_hecke, presentation_table,
    product_exponent, product_formula_scalar, reduction_map, satake_generators, tP_image_scalar,
)
from root_data import Weight
from scalars import PI, Q, ScalarContext, SymbolicScalar


def _q(level, k):
    return SymbolicScalar(Q ** k, level.context)


def test_level_from_sizes():
    level = LevelData.from_sizes(5, [1, 2])
    assert level.n == 3
    assert level.orbits == ((0,), (1, 2))
    assert level.cocharacter((4, -1)) == (4, -1, -1)
    assert product_exponent((1, 3), level) == 2
    assert n_of([0, 1], level) == 2


def test_conv_dominant_pair_is_free():
    level = LevelData.principal_series(5, 2)
    scalar, total = conv_TT((1, 0), (1, 0), level)
    assert scalar == SymbolicScalar.one(level.context)
    assert total == Weight.of((2, 0))


def test_conv_dominant_antidominant():
    level = LevelData.principal_series(5, 2)
    scalar, total = conv_TT((1, 0), (0, 1), level)
    assert scalar == _q(level, 1)
    assert total == Weight.of((1, 1))


def test_conv_inverse_pair():
    level = LevelData.principal_series(7, 3)
    for k in (1, 2):
        eps = tuple(1 if i < k else 0 for i in range(3))
        scalar, total = conv_TT(eps, tuple(-x for x in eps), level)
        assert total == Weight.zero(3)
        assert scalar ** -1 == T_inverse_scalar(k, 3, level.context)


def test_conv_needs_central_cocharacters():
    level = LevelData.from_sizes(5, [2])
    with pytest.raises(NotCentral):
        conv_TT((1, 0), (0, 0), level)


def test_normalization_scalars():
    ctx = ScalarContext(5)
    assert T_inverse_scalar(1, 3, ctx) == SymbolicScalar(Q ** -2, ctx)
    assert tP_image_scalar([0], 3, ctx) == SymbolicScalar(Q ** -1, ctx)
    assert tP_image_scalar(2, 4, ctx) ** 2 == T_inverse_scalar(2, 4, ctx)


def test_product_formula():
    level = LevelData.principal_series(5, 3)
    assert product_formula_scalar((0, 1, 2), (0, 1, 2), level) == _q(level, product_exponent((0, 1, 2), level))
    with pytest.raises(InvalidOrder):
        product_formula_scalar((2, 1, 0), (0, 1, 2), level)
    with pytest.raises(InvalidOrder):
        product_formula_scalar((0, 1, 2), (0, 1), level)


def test_hecke_arithmetic():
    level = LevelData.principal_series(5, 2)
    a = parse_hecke("x1 + x2", level)
    b = parse_hecke("x1*x2", level)
    assert a * b == parse_hecke("x1^2*x2 + x1*x2^2", level)
    assert b ** -1 * b == HeckeElt.one(level)
    assert (a - a).is_zero()
    with pytest.raises(ValueError):
        a ** -1


def test_symmetry_and_integrality():
    level = LevelData.principal_series(5, 2, classes=[(0, 1)])
    assert parse_hecke("x1 + x2", level).is_symmetric()
    with pytest.raises(NotSymmetric):
        integral_membership(parse_hecke("x1", level))
    assert integral_membership(parse_hecke("x1 + x2", level))
    assert integral_membership(parse_hecke("x1*x2", level))
    assert not integral_membership(parse_hecke("q^-2*x1*x2", level))
    assert integral_membership(parse_hecke("q^-1*x1*x2", level))


def test_generator_normalization():
    level = LevelData.principal_series(5, 3)
    expected = HeckeElt.monomial(level, (1, 1, 0), SymbolicScalar(Q ** -1, level.context))
    assert generator(level, None, [0, 1], [1, 1]) == expected


def test_generator_with_weight():
    level = LevelData.principal_series(7, 2)
    lam = Weight.of((3, 1))
    h = generator(level, lam, [1], [1])
    assert h == HeckeElt.monomial(level, (0, 1), SymbolicScalar(PI ** -1, level.context))
    assert integral_membership(h, lam)


def test_presentation_table_is_integral():
    level = LevelData.principal_series(5, 3)
    rows = presentation_table(level)
    assert len(rows) == 8
    assert all(row['integral'] for row in rows)
    assert rows[-1]['classes'] == 'all'
    assert integral_membership(inverse_generator(level))


def test_reduction_of_orbit_sets():
    level = LevelData.principal_series(5, 3)
    y1, y2, _ = satake_generators(3, 5)
    T = {ids: T_orbit_set(level, ids) for ids in [(0,), (1,), (0, 1), (0, 2)]}
    assert reduction_map(level, T[(0,)]) == y1
    assert reduction_map(level, T[(0, 1)]) == y2
    assert reduction_map(level, T[(1,)]).is_zero()
    assert reduction_map(level, T[(0, 2)]).is_zero()
    product = T[(0,)] * T[(1,)]
    assert reduction_map(level, product) == reduction_map(level, T[(0,)]) * reduction_map(level, T[(1,)])


def test_reduction_rejects_non_integral():
    level = LevelData.principal_series(5, 2)
    h = HeckeElt.monomial(level, (1, 0), SymbolicScalar(Q ** -1, level.context))
    with pytest.raises(NotIntegral):
        reduction_map(level, h)


def test_mod_p_algebra():
    y1, y2 = satake_generators(2, 3)
    three = ModPHeckeElt(2, 3, {(1, 0): 3})
    assert three.is_zero()
    assert (y1 * y2).terms == {(1, 1): 1}
    assert sp.expand((y1 * y2).to_x_expr() - sp.Symbol('x1') ** 2 * sp.Symbol('x2')) == 0


def test_galois_dictionary_generators():
    level = LevelData.principal_series(5, 2)
    ctx = level.context
    u, w = sp.symbols('u w')
    wd = {0: SymbolicScalar(u, ctx), 1: SymbolicScalar(w, ctx)}
    assert galois_dictionary(generator(level, None, [0], [1]), wd) == SymbolicScalar(u, ctx)
    assert galois_dictionary(generator(level, None, [0, 1], [1, 1]), wd) == SymbolicScalar(Q ** -1 * u * w, ctx)


def _random_hecke(rng, level):
    out = HeckeElt.zero(level)
    for _ in range(rng.randint(1, 3)):
        exps = tuple(rng.randint(-2, 2) for _ in range(level.num_orbits))
        coeff = rng.choice([-2, -1, 1, 3]) * Q ** sp.Rational(rng.randint(-2, 2), 2) * PI ** rng.randint(0, 2)
        out = out + HeckeElt.monomial(level, exps, coeff)
    return out


def test_hecke_product_is_associative(rng):
    for level in (LevelData.principal_series(5, 2), LevelData.from_sizes(7, [1, 2])):
        for _ in range(10):
            a, b, c = (_random_hecke(rng, level) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
