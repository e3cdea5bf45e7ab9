import pytest
import sympy as sp

from errors import NegativeValuation, UnitAmbiguity
from scalars import (
    PI, Q, ScalarContext, SymbolicScalar, elementary_symmetric, frob_var, laurent_terms,
    parse_scalar, reduce_mod_varpi, valuation,
)

CTX = ScalarContext(5, 1, 2)
t1, t2 = frob_var(1), frob_var(2)
tt1, tt2 = frob_var(1, lift=True), frob_var(2, lift=True)


def test_valuation():
    assert valuation(SymbolicScalar(PI ** 2 + Q, CTX)) == 2
    assert valuation(SymbolicScalar(PI + Q, CTX)) == 1
    assert valuation(SymbolicScalar(Q ** sp.Rational(1, 2) * t1, CTX)) == 1
    assert valuation(SymbolicScalar.zero(CTX)) == sp.oo


def test_reduce_lift_variables():
    ctx = ScalarContext(7)
    s = SymbolicScalar(Q ** -1 * Q * tt1 * tt2, ctx)
    assert reduce_mod_varpi(s) == SymbolicScalar(t1 * t2, ctx)


def test_reduce_drops_positive_valuation_and_reduces_coefficients():
    s = SymbolicScalar(PI * t1 + 6 + 5 * t2, CTX)
    assert s.reduce_mod_varpi() == SymbolicScalar(1, CTX)


def test_reduce_negative_valuation():
    with pytest.raises(NegativeValuation):
        SymbolicScalar(PI ** -1 + 1, CTX).reduce_mod_varpi()


def test_reduce_unit_ambiguity():
    ctx = ScalarContext(5)
    with pytest.raises(UnitAmbiguity):
        SymbolicScalar(PI * Q ** -1, ctx).reduce_mod_varpi()


def test_half_integral_q_powers():
    one_half = SymbolicScalar.q_power(1, CTX)
    assert one_half * SymbolicScalar.q_power(3, CTX) == SymbolicScalar(Q ** 2, CTX)
    assert one_half ** -2 == SymbolicScalar(Q ** -1, CTX)


def test_text_round_trip():
    s = SymbolicScalar(3 * PI ** 2 * Q ** sp.Rational(-1, 2) * t1 - t2, CTX)
    assert parse_scalar(s.to_text(), CTX) == s
    assert SymbolicScalar.zero(CTX).to_text() == "0"


def test_only_monomials_invert():
    s = SymbolicScalar(PI + Q, CTX)
    with pytest.raises(ValueError):
        s ** -1
    with pytest.raises(ValueError):
        SymbolicScalar(1, CTX) / s
    assert SymbolicScalar(PI * Q, CTX) / SymbolicScalar(Q, CTX) == SymbolicScalar(PI, CTX)


def test_rejects_non_integer_coefficients():
    with pytest.raises(ValueError):
        SymbolicScalar(sp.Rational(1, 2) * PI, CTX)


def test_context_mismatch():
    with pytest.raises(ValueError):
        SymbolicScalar(1, CTX) + SymbolicScalar(1, ScalarContext(3))


def test_elementary_symmetric():
    a, b, c = sp.symbols('a b c')
    assert sp.expand(elementary_symmetric(2, [a, b, c]) - (a * b + a * c + b * c)) == 0
    assert elementary_symmetric(0, [a, b]) == 1
    assert elementary_symmetric(3, [a, b]) == 0


def test_laurent_terms():
    x1, x2 = sp.symbols('x1 x2')
    terms = laurent_terms(Q * x1 ** 2 / x2 + 3 * x1, [x1, x2])
    assert terms == {(2, -1): Q, (1, 0): 3}


def _random_scalar(rng, ctx):
    expr = 0
    for _ in range(rng.randint(1, 3)):
        expr += (rng.choice([-3, -2, -1, 1, 2, 5]) * PI ** rng.randint(-2, 3)
                 * Q ** sp.Rational(rng.randint(-3, 3), 2) * t1 ** rng.randint(-1, 2) * t2 ** rng.randint(0, 1))
    return SymbolicScalar(expr, ctx)


def test_valuation_is_ultrametric_and_multiplicative(rng):
    for _ in range(500):
        a, b = _random_scalar(rng, CTX), _random_scalar(rng, CTX)
        va, vb = valuation(a), valuation(b)
        assert valuation(a + b) >= min(va, vb)
        if not a.is_zero() and not b.is_zero():
            assert valuation(a * b) == va + vb
