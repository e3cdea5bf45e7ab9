import pytest
import sympy as sp

from bk_frobenius import (
    V, F_tilde, block_scalar_family, change_eigenbasis, conjugate_in_parabolic, construct_bounded,
    divisibility_check, f_function, family_from_spec, frobenius_matrix, function_table, lift_family,
    parabolic_factorization, random_parabolic_element, recompose, retarget, truncated_inverse, mat_truncate,
    wd_datum_of,
)
from errors import ConfigError, NotFactorizable, NotInParabolic
from hecke import galois_dictionary, generator, type_level
from root_data import permutation_matrix
from scalars import Q, SymbolicScalar, frob_var
from tame_types import build_type, principal_series_type_of, random_type, serre_weight, valid_orientations


@pytest.fixture
def ps_type():
    return principal_series_type_of(serre_weight(11, 1, 3, [(4, 2, 0)]))


def test_block_scalar_family_reads_back_its_units(ps_type):
    fam = block_scalar_family(ps_type, [2, 3, 5])
    wd = wd_datum_of(fam)
    ctx = fam.context
    assert wd.det_frob == {0: SymbolicScalar(2, ctx), 1: SymbolicScalar(3, ctx), 2: SymbolicScalar(5, ctx)}


def test_generators_match_global_functions(ps_type):
    fam = block_scalar_family(ps_type, [2, 3, 5])
    level = type_level(ps_type)
    wd = wd_datum_of(fam).det_frob
    for classes in ([0], [0, 1], [0, 1, 2], [1, 2]):
        degrees = [1] * len(classes)
        assert galois_dictionary(generator(level, None, classes, degrees), wd) == F_tilde(fam, classes, degrees)


def test_lift_family_values(ps_type):
    fam = lift_family(ps_type)
    tt = [frob_var(i + 1, lift=True) for i in range(3)]
    F = frobenius_matrix(fam)
    assert sp.expand(F[1, 1] - Q * tt[1]) == 0
    value = F_tilde(fam, [0, 1], [1, 1])
    assert value == SymbolicScalar(tt[0] * tt[1], fam.context)


def test_identity_gauge_changes_nothing(ps_type):
    fam = construct_bounded(ps_type, seed=3)
    same = change_eigenbasis(fam, {0: sp.eye(3)})
    assert same.matrices == fam.matrices


def test_gauge_outside_parabolic_is_rejected(ps_type):
    fam = construct_bounded(ps_type, seed=3)
    lower = sp.Matrix([[1, 0, 0], [1, 1, 0], [0, 0, 1]])
    with pytest.raises(NotInParabolic):
        change_eigenbasis(fam, {0: lower})


def test_bounded_family_divisibility():
    t = build_type(5, 1, 1, 2, [3, 1], (0, 1))
    for seed in range(5):
        fam = construct_bounded(t, seed=seed)
        assert divisibility_check(fam, [0, 1], [1, 1])
        assert len(function_table(fam)) == 2


def test_truncated_inverse():
    P = sp.Matrix([[1 + V, 2 * V], [V ** 2, 1]])
    inv = truncated_inverse(P, 4)
    assert mat_truncate((P * inv).applyfunc(sp.expand), 4) == sp.eye(2)


def test_parabolic_factorization_round_trip():
    A = sp.Matrix([[1 + V, 0], [V, 2]])
    factors = parabolic_factorization(A, (0, 1), (1, 1))
    assert factors.D_b == sp.ImmutableMatrix([[2]])
    assert recompose(factors) == A
    with pytest.raises(NotFactorizable):
        parabolic_factorization(sp.Matrix([[1, V], [0, 1]]), (0, 1), (1, 1))


def test_factorization_of_a_conjugated_matrix(rng):
    w = (2, 0, 1)
    P = permutation_matrix(w)
    block_lower = sp.Matrix([[1 + V, 0, 0], [2, 3, 5 * V], [V, 1, 1 + 2 * V]])
    A = (P.T * block_lower * P).applyfunc(sp.expand)
    lead, trail = block_lower[:1, :1].det(), block_lower[1:, 1:].det()
    moved_any = False
    for _ in range(5):
        g = random_parabolic_element((1, 2), rng)
        assert sp.expand(g.det()) == 1
        moved = conjugate_in_parabolic(A, w, g)
        moved_any = moved_any or moved != A
        factors = parabolic_factorization(moved, w, (1, 2))
        assert recompose(factors) == moved
        assert sp.cancel(sp.Matrix(factors.D_a * factors.M_a).det() - lead) == 0
        assert sp.cancel(sp.Matrix(factors.D_b * factors.M_b).det() - trail) == 0
    assert moved_any


def test_family_from_spec(ps_type):
    fam = family_from_spec(ps_type, {'kind': 'diagonal', 'diagonal': [["2", "q*3", "q^2"]]})
    assert frobenius_matrix(fam)[0, 0] == 2
    with pytest.raises(ConfigError):
        family_from_spec(ps_type, {'kind': 'mystery'})
    with pytest.raises(ConfigError):
        family_from_spec(ps_type, {'kind': 'diagonal'})


def test_global_functions_do_not_depend_on_orientation(rng):
    types = [build_type(5, 1, 1, 2, [2, 2], (0, 1))]
    types += [random_type(rng, 5, rng.randint(2, 3), rng.randint(1, 2)) for _ in range(4)]
    for t in types:
        fam = construct_bounded(t, seed=rng.randrange(1000))
        keys = [(c, d) for c in range(len(t.classes)) for d in range(1, t.class_size(c) + 1)]
        before = {key: f_function(fam, *key) for key in keys}
        orientations = valid_orientations(t)
        assert orientations
        for orientation in orientations:
            moved = retarget(fam, orientation)
            assert moved.orientation == tuple(orientation)
            assert {key: f_function(moved, *key) for key in keys} == before
    assert len(valid_orientations(types[0])) == 2
