import itertools
from collections import Counter

import pytest
import sympy as sp

import coset_oracle
from coset_oracle import (
    cauchy_binet_check, conv_formula_table, default_depth, elementary_divisor_exponents, enumerate_cosets,
    in_y_span, ps_coinvariants_oracle, satake_oracle_gl2,
)
from errors import CosetCountMismatch, DimensionMismatch, FieldTooLarge
from root_data import act, all_permutations


def _expected_coinvariants(n, q, chi):
    return Counter(tuple(x % (q - 1) for x in act(w, chi)) for w in all_permutations(n))


def test_cauchy_binet(rng):
    for k in (1, 2, 3):
        A = sp.Matrix(3, 3, lambda i, j: rng.randint(-3, 3))
        B = sp.Matrix(3, 3, lambda i, j: rng.randint(-3, 3))
        assert cauchy_binet_check(A, B, k), f"minor identity fails for k={k}"


def test_cauchy_binet_shapes():
    with pytest.raises(DimensionMismatch):
        cauchy_binet_check(sp.eye(2), sp.eye(3), 1)


def test_elementary_divisors():
    assert elementary_divisor_exponents([[3, 0], [0, 9]], 3) == (1, 2)


@pytest.mark.parametrize("n,q,chi", [
    (2, 2, (0, 0)), (2, 3, (1, 0)), (2, 3, (0, 0)),
    (2, 4, (0, 0)), (2, 4, (1, 0)), (2, 4, (2, 1)),
])
def test_coinvariants_match_weyl_orbit(n, q, chi):
    assert ps_coinvariants_oracle(n, q, chi) == _expected_coinvariants(n, q, chi)


def test_coinvariants_over_f4_have_weyl_group_size():
    observed = ps_coinvariants_oracle(2, 4, (2, 0))
    assert sum(observed.values()) == 2
    assert observed == Counter({(2, 0): 1, (0, 2): 1})


def test_coinvariants_refuse_large_fields():
    with pytest.raises(FieldTooLarge):
        ps_coinvariants_oracle(2, 5, (0, 0))
    with pytest.raises(DimensionMismatch):
        ps_coinvariants_oracle(2, 1, (0, 0))


def test_in_y_span():
    x1, x2 = sp.symbols('x1 x2')
    assert in_y_span(x1 ** 2 * x2 + 3 * x1)
    assert not in_y_span(x2)


def test_satake_gl2_lands_in_y_span():
    for m in (0, 1):
        value = satake_oracle_gl2(3, 1, m, (-1, 0))
        assert in_y_span(value), f"S(T) = {value} for m={m}"
    with pytest.raises(DimensionMismatch):
        satake_oracle_gl2(3, 1, 0, (0, -1))


def test_conv_formula_dominant_pair():
    rows = conv_formula_table(2, 2, [((1, 0), (1, 0))])
    assert rows[0]['target'] == '[2, 0]'
    assert rows[0]['formula'] == 1
    assert rows[0]['match'], rows[0]


def test_iwahori_coset_count_does_not_depend_on_depth(rng):
    for _ in range(4):
        n = rng.choice([2, 3])
        p = rng.choice([2, 3])
        mu = tuple(rng.randint(-1, 1) for _ in range(n))
        expected = p ** sum(abs(mu[i] - mu[k]) for i, k in itertools.combinations(range(n), 2))
        base = default_depth(mu)
        counts = {len(enumerate_cosets(n, p, 'iwahori', mu, depth)) for depth in (base, base + 1, base + 3)}
        assert counts == {expected}


def test_iwahori_count_mismatch_is_an_error(monkeypatch):
    full = coset_oracle._iwahori_candidates
    monkeypatch.setattr(coset_oracle, '_iwahori_candidates',
                        lambda mu, p, scale: itertools.islice(full(mu, p, scale), 1))
    with pytest.raises(CosetCountMismatch):
        enumerate_cosets(2, 3, 'iwahori', (1, 0))
