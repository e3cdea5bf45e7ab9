import random

import pytest

from errors import InvalidExponent, InvalidPermutation, NonRegularDigits, NotRestricted
from root_data import Weight
from tame_types import (
    R_operator, build_type, combine_embeddings, deepness, dual, is_m_deep, is_m_generic, lowest_alcove_presentation,
    principal_series_type_of, random_deep_weight, random_type, serre_weight, sw_predicates,
    valid_orientations, valid_s_tau_choices,
)


def test_two_cycle_type():
    t = build_type(3, 1, 1, 2, [1, 3], (1, 0))
    assert t.r == 2 and t.modulus == 8
    assert t.orbits == ((0, 1),)
    assert t.classes == ((0,),)
    assert not t.is_principal_series()
    d = t.to_dict()
    assert d['s_tau'] == [2, 1]
    assert d['digits'] == [[1, 0], [0, 1]]


def test_two_cycle_presentation():
    t = build_type(3, 1, 1, 2, [1, 3], (1, 0))
    pres = lowest_alcove_presentation(t)
    assert pres.s == ((1, 0),)
    assert pres.mu == Weight.of((0, 0))
    assert not pres.non_regular


def test_incompatible_s_tau():
    with pytest.raises(InvalidPermutation):
        build_type(3, 1, 1, 2, [1, 2], (1, 0))
    with pytest.raises(InvalidExponent):
        build_type(3, 1, 1, 2, [9, 0], (0, 1))


def test_valid_s_tau_choices():
    assert valid_s_tau_choices(3, 1, 2, [1, 3]) == [(1, 0)]


def test_principal_series_relabels_descending():
    t = build_type(5, 1, 1, 2, [1, 3], (0, 1))
    assert t.a_prime == (3, 1)
    assert t.relabel == (1, 0)
    assert t.is_principal_series() and t.is_regular()
    assert lowest_alcove_presentation(t).mu == Weight.of((2, 1))


def test_equal_characters_form_one_class():
    t = build_type(5, 1, 1, 2, [2, 2], (0, 1))
    assert t.orbits == ((0,), (1,))
    assert t.classes == ((0, 1),)
    assert t.class_size(0) == 2
    assert len(valid_orientations(t)) == 2
    with pytest.warns(NonRegularDigits):
        pres = lowest_alcove_presentation(t)
    assert pres.non_regular


def test_dual_of_principal_series():
    t = build_type(5, 1, 1, 2, [3, 1], (0, 1))
    assert dual(t).a_prime == (3, 1)
    assert dual(dual(t)) == t


def test_random_types_satisfy_the_congruence():
    rng = random.Random(11)
    for _ in range(15):
        t = random_type(rng, 3, 4, 1)
        q, mod = t.q, t.modulus
        assert all((t.a_prime[i] - q * t.a_prime[t.s_tau[i]]) % mod == 0 for i in range(t.n))
    assert random_type(rng, 5, 3, 2, principal=True).is_principal_series()


def test_serre_weight_restricted():
    sigma = serre_weight(5, 2, 2, [(3, 1), (4, 0)])
    assert sigma.lambda_f == combine_embeddings([(3, 1), (4, 0)], 5)
    with pytest.raises(NotRestricted):
        serre_weight(5, 1, 2, [(7, 1)])


def test_combine_embeddings():
    assert combine_embeddings([(1, 2), (3, 4)], 5) == (16, 22)


def test_deepness():
    sigma = serre_weight(11, 1, 2, [(5, 2)])
    assert deepness(sigma) == 3
    assert is_m_deep(sigma, 3) and not is_m_deep(sigma, 4)
    preds = sw_predicates(sigma, [2], 3)
    assert preds.regular and preds.M_regular and preds.non_steinberg and preds.m_deep


def test_principal_series_type_of():
    t = principal_series_type_of(serre_weight(11, 1, 3, [(4, 2, 0)]))
    assert t.a_prime == (6, 3, 0)
    assert t.is_principal_series()


def test_R_operator():
    assert R_operator(serre_weight(5, 1, 2, [(1, 0)])).lambda_1 == Weight.of((-1, -3))


def test_random_deep_weight_feeds_principal_series(rng):
    for _ in range(5):
        sigma = random_deep_weight(rng, 37, 4, 2, 4)
        assert is_m_deep(sigma, 4)
        assert principal_series_type_of(sigma).n == 4


@pytest.mark.parametrize("n,m,p", [(2, 4, 19), (3, 6, 29), (4, 8, 37), (3, 8, 29), (4, 11, 53)])
def test_random_deep_weight_reaches_the_requested_depth(rng, n, m, p):
    for _ in range(20):
        sigma = random_deep_weight(rng, p, n, rng.randint(1, 2), m)
        assert deepness(sigma) >= m
        assert principal_series_type_of(sigma).n == n


def test_random_deep_weight_needs_room():
    with pytest.raises(NotRestricted):
        random_deep_weight(random.Random(0), 37, 4, 1, 11)


def test_digits_recover_the_exponents(rng):
    for _ in range(10):
        p = rng.choice([3, 5, 7])
        t = random_type(rng, p, rng.randint(2, 4), rng.randint(1, 2))
        assert len(t.digits) == t.f_prime
        for i in range(t.n):
            assert all(0 <= t.digits[jp][i] < p for jp in range(t.f_prime))
            assert sum(t.digits[jp][i] * p ** jp for jp in range(t.f_prime)) == t.a_prime[i]


def test_genericity_is_monotone_in_m(rng):
    for _ in range(8):
        p = rng.choice([11, 13])
        t = random_type(rng, p, rng.randint(2, 3), 1)
        generic = [is_m_generic(t, m) for m in range(p + 1)]
        assert not generic[p]
        assert all(generic[m] or not generic[m + 1] for m in range(p))
