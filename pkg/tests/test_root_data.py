import itertools
import random

import pytest
import sympy as sp

from errors import DimensionMismatch, InvalidPartition
from root_data import (
    ExtAffWeylElt, Presentation, Weight, act, act_weight, all_permutations, antidominant_orbit_rep,
    compose, cycles, dot_action, eta, identity_perm, inverse, is_in_C0, length, levi_decompose,
    levi_weyl_group, longest_element, normalize_blocks, perm_order, permutation_matrix,
    twist_presentation, wM_reps,
)


def test_act_moves_entry_i_to_w_of_i():
    assert act((1, 2, 0), ('a', 'b', 'c')) == ('c', 'a', 'b')
    with pytest.raises(DimensionMismatch):
        act((1, 0), (1, 2, 3))


def test_group_laws():
    for w, u in itertools.product(all_permutations(3), repeat=2):
        assert compose(w, inverse(w)) == identity_perm(3)
        assert act(compose(w, u), (5, 7, 11)) == act(w, act(u, (5, 7, 11)))


def test_lengths_and_orders():
    assert length(longest_element(4)) == 6
    assert length(identity_perm(4)) == 0
    assert perm_order((1, 2, 0)) == 3
    assert cycles((1, 0, 2)) == [(0, 1), (2,)]


def test_permutation_matrix_sends_basis_vectors():
    w = (2, 0, 1)
    P = permutation_matrix(w)
    for a in range(3):
        e_a = sp.Matrix([1 if i == a else 0 for i in range(3)])
        assert P * e_a == sp.Matrix([1 if i == w[a] else 0 for i in range(3)])


def test_weight_validation():
    with pytest.raises(DimensionMismatch):
        Weight(((1, 2), (3,)))
    lam = Weight.of((3, 1), (2, 2))
    assert (lam.n, lam.f) == (2, 2)
    assert lam.is_dominant() and not lam.is_regular()


def test_ext_affine_inverse(rng):
    for _ in range(20):
        nu = Weight(tuple(tuple(rng.randint(-3, 3) for _ in range(3)) for _ in range(2)))
        ws = []
        for _ in range(2):
            w = list(range(3))
            rng.shuffle(w)
            ws.append(tuple(w))
        x = ExtAffWeylElt(nu, tuple(ws))
        assert x * x.inverse() == ExtAffWeylElt.identity(3, 2)


def test_dot_action():
    mu = Weight.of((4, 1, 0))
    assert dot_action(ExtAffWeylElt.identity(3), mu) == mu
    w0 = ExtAffWeylElt.finite([longest_element(2)])
    assert dot_action(w0, Weight.of((-4, 0))) == Weight.of((-1, -3))


def test_lowest_alcove():
    assert is_in_C0(Weight.zero(3), 5)
    assert not is_in_C0(Weight.zero(3), 2)


def test_twist_by_identity_is_trivial():
    pres = Presentation(((1, 0, 2),), Weight.of((3, 1, 0)))
    assert twist_presentation(ExtAffWeylElt.identity(3), pres) == pres


def test_normalize_blocks():
    assert normalize_blocks(3, [2, 1]) == [(0, 1), (2,)]
    assert normalize_blocks(3, [[3], [1, 2]]) == [(0, 1), (2,)]
    with pytest.raises(InvalidPartition):
        normalize_blocks(3, [[1, 3], [2]])
    with pytest.raises(InvalidPartition):
        normalize_blocks(3, [2, 2])


def test_levi_decomposition():
    reps = set(wM_reps(4, [2, 2]))
    assert len(reps) == 6
    levi = set(levi_weyl_group(4, [2, 2]))
    for w in all_permutations(4):
        u, v = levi_decompose(w, [2, 2])
        assert u in levi and v in reps, f"bad decomposition of {w}: {u}, {v}"
        assert compose(u, v) == w


def test_antidominant_orbit_rep():
    rng = random.Random(3)
    for _ in range(10):
        mu = Weight((tuple(rng.randint(-4, 4) for _ in range(4)),))
        rep, perms = antidominant_orbit_rep(mu)
        assert rep.is_antidominant()
        assert act_weight(perms, mu) == rep


def test_eta():
    assert eta(3, 2) == Weight.of((2, 1, 0), (2, 1, 0))


def _random_element(rng, n, f):
    nu = Weight(tuple(tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(f)))
    ws = []
    for _ in range(f):
        w = list(range(n))
        rng.shuffle(w)
        ws.append(tuple(w))
    return ExtAffWeylElt(nu, tuple(ws))


def test_twisting_is_an_action(rng):
    for _ in range(30):
        n, f = rng.choice([2, 3]), rng.choice([1, 2, 3])
        pres = Presentation(
            _random_element(rng, n, f).finite_part,
            Weight(tuple(tuple(rng.randint(-2, 5) for _ in range(n)) for _ in range(f))),
        )
        x, y = _random_element(rng, n, f), _random_element(rng, n, f)
        assert twist_presentation(x * y, pres) == twist_presentation(x, twist_presentation(y, pres))
        assert twist_presentation(x.inverse(), twist_presentation(x, pres)) == pres
