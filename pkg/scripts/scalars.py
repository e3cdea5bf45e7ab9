"""
SatakeForge - Exact coefficient ring

Integer combinations of monomials pi^a * q^c * (Frobenius variables), a in Z,
c in (1/2)Z. pi and q are independent sympy symbols tied together only by
the valuation v(pi) = 1, v(q) = e*f.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

import sympy as sp

from errors import NegativeValuation, UnitAmbiguity

logger = logging.getLogger(__name__)

PI = sp.Symbol('pi', positive=True)
Q = sp.Symbol('q', positive=True)
SQRT_Q = Q ** sp.Rational(1, 2)

_LIFT_PREFIX = 'tt'
_RESIDUAL_PREFIX = 't'


def frob_var(i: int, lift: bool = False) -> sp.Symbol:
    """Formal Frobenius eigenvalue t_i, or its lift tt_i"""
    return sp.Symbol(f"{_LIFT_PREFIX if lift else _RESIDUAL_PREFIX}{i}")


def is_lift_var(sym: sp.Symbol) -> bool:
    return sym.name.startswith(_LIFT_PREFIX)


def laurent_terms(expr, gens: Sequence[sp.Symbol]) -> Dict[Tuple[int, ...], sp.Expr]:
    """
    Split an expression into {exponent tuple in gens: coefficient}.

    Coefficients may still contain any symbol not in gens. Exponents of gens
    must be integers.
    """
    out: Dict[Tuple[int, ...], sp.Expr] = {}
    for term in sp.Add.make_args(sp.expand(expr)):
        if term == 0:
            continue
        powers = term.as_powers_dict()
        exps = []
        for g in gens:
            e = powers.get(g, 0)
            if not sp.sympify(e).is_integer:
                raise ValueError(f"Non-integer exponent {e} of {g} in {term}")
            exps.append(int(e))
        key = tuple(exps)
        mono = sp.Mul(*[g ** e for g, e in zip(gens, key)])
        out[key] = out.get(key, sp.Integer(0)) + sp.expand(term / mono)
    return {k: v for k, v in out.items() if sp.expand(v) != 0}


@dataclass(frozen=True)
class ScalarContext:
    """Arithmetic context (p, e, f); q = p^f and v(q) = e*f"""
    p: int
    e: int = 1
    f: int = 1

    @property
    def q_valuation(self) -> int:
        return self.e * self.f


@dataclass(frozen=True, order=True)
class ScalarMonomial:
    pi_exp: int
    q_exp_doubled: int
    frob_exps: Tuple[Tuple[str, int], ...] = ()

    def valuation(self, ctx: ScalarContext) -> sp.Rational:
        return sp.Integer(self.pi_exp) + sp.Rational(self.q_exp_doubled, 2) * ctx.q_valuation

    def to_expr(self) -> sp.Expr:
        expr = PI ** self.pi_exp * Q ** sp.Rational(self.q_exp_doubled, 2)
        for name, e in self.frob_exps:
            expr *= sp.Symbol(name) ** e
        return expr


def _split_term(term: sp.Expr) -> Tuple[int, ScalarMonomial]:
    coeff, rest = term.as_coeff_Mul()
    if not coeff.is_integer:
        raise ValueError(f"Scalar coefficients must be integers, got {coeff} in {term}")
    pi_exp, q_doubled, frob = 0, 0, []
    for base, e in rest.as_powers_dict().items():
        if base == 1:
            continue
        if base == PI:
            if not sp.sympify(e).is_integer:
                raise ValueError(f"Non-integer pi exponent in {term}")
            pi_exp = int(e)
        elif base == Q:
            doubled = 2 * sp.sympify(e)
            if not doubled.is_integer:
                raise ValueError(f"q exponent must be a half-integer in {term}")
            q_doubled = int(doubled)
        elif isinstance(base, sp.Symbol):
            if not sp.sympify(e).is_integer:
                raise ValueError(f"Non-integer Frobenius exponent in {term}")
            frob.append((base.name, int(e)))
        else:
            raise ValueError(f"Unsupported factor {base}**{e} in {term}")
    return int(coeff), ScalarMonomial(pi_exp, q_doubled, tuple(sorted(frob)))


class SymbolicScalar:
    """
    Element of Z[pi^±, q^±1/2, t^±]: immutable, canonical (expanded) form.

    Args:
        expr: Anything sympify accepts, built from PI, Q and Frobenius symbols
        context: ScalarContext used for valuations and reductions
    """

    __slots__ = ('expr', 'context', '_terms')

    def __init__(self, expr, context: ScalarContext):
        expanded = sp.expand(sp.sympify(expr))
        terms: Dict[ScalarMonomial, int] = {}
        for term in sp.Add.make_args(expanded):
            if term == 0:
                continue
            c, mono = _split_term(term)
            terms[mono] = terms.get(mono, 0) + c
        terms = {m: c for m, c in terms.items() if c != 0}
        object.__setattr__(self, 'expr', expanded)
        object.__setattr__(self, 'context', context)
        object.__setattr__(self, '_terms', terms)

    def __setattr__(self, name, value):
        raise AttributeError("SymbolicScalar is immutable")

    # Constructors

    @classmethod
    def zero(cls, context: ScalarContext) -> 'SymbolicScalar':
        return cls(0, context)

    @classmethod
    def one(cls, context: ScalarContext) -> 'SymbolicScalar':
        return cls(1, context)

    @classmethod
    def q_power(cls, doubled: int, context: ScalarContext) -> 'SymbolicScalar':
        """q^(doubled/2)"""
        return cls(Q ** sp.Rational(doubled, 2), context)

    # Structure

    @property
    def terms(self) -> Dict[ScalarMonomial, int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    # Arithmetic

    def _coerce(self, other) -> 'SymbolicScalar':
        if isinstance(other, SymbolicScalar):
            if other.context != self.context:
                raise ValueError(f"Context mismatch: {self.context} vs {other.context}")
            return other
        return SymbolicScalar(other, self.context)

    def __add__(self, other):
        return SymbolicScalar(self.expr + self._coerce(other).expr, self.context)

    __radd__ = __add__

    def __sub__(self, other):
        return SymbolicScalar(self.expr - self._coerce(other).expr, self.context)

    def __rsub__(self, other):
        return SymbolicScalar(self._coerce(other).expr - self.expr, self.context)

    def __neg__(self):
        return SymbolicScalar(-self.expr, self.context)

    def __mul__(self, other):
        return SymbolicScalar(self.expr * self._coerce(other).expr, self.context)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0 and not self.is_monomial():
            raise ValueError("Only monomials can be inverted")
        return SymbolicScalar(self.expr ** k, self.context)

    def __truediv__(self, other):
        other = self._coerce(other)
        if not other.is_monomial():
            raise ValueError("Division is only defined by monomials")
        return self * other ** -1

    def __eq__(self, other):
        if isinstance(other, SymbolicScalar):
            return self.context == other.context and self._terms == other._terms
        try:
            return self._terms == SymbolicScalar(other, self.context)._terms
        except (ValueError, TypeError, sp.SympifyError):
            return NotImplemented

    def __hash__(self):
        return hash((self.context, frozenset(self._terms.items())))

    def subs(self, mapping) -> 'SymbolicScalar':
        return SymbolicScalar(self.expr.subs(mapping, simultaneous=True), self.context)

    # Valuation and reduction

    def valuation(self):
        """min over terms of pi_exp + (q_exp_doubled/2)*e*f; +oo for zero"""
        if not self._terms:
            return sp.oo
        return min(m.valuation(self.context) for m in self._terms)

    def reduce_mod_varpi(self) -> 'SymbolicScalar':
        """
        Residue modulo the maximal ideal.

        Drops every term of positive valuation; surviving terms must be pure
        Frobenius-variable monomials. Lift variables tt_i become t_i and
        integer coefficients are reduced mod p.
        """
        v = self.valuation()
        if v == sp.oo:
            return SymbolicScalar.zero(self.context)
        if v < 0:
            raise NegativeValuation(f"valuation {v} < 0 for {self.to_text()}")

        p = self.context.p
        residual = sp.Integer(0)
        for mono, c in self._terms.items():
            if mono.valuation(self.context) > 0 or c % p == 0:
                continue
            if mono.pi_exp != 0 or mono.q_exp_doubled != 0:
                raise UnitAmbiguity(
                    f"valuation-0 term with pi^{mono.pi_exp} q^({mono.q_exp_doubled}/2) "
                    f"has no determined residue"
                )
            term = sp.Integer(c % p)
            for name, e in mono.frob_exps:
                if name.startswith(_LIFT_PREFIX):
                    name = _RESIDUAL_PREFIX + name[len(_LIFT_PREFIX):]
                term *= sp.Symbol(name) ** e
            residual += term
        return SymbolicScalar(residual, self.context)

    # Text form

    def to_text(self) -> str:
        """Canonical form: c * pi^a * q^(b/2) * t1^e1 + ..."""
        if not self._terms:
            return "0"
        parts = []
        for mono in sorted(self._terms):
            factors = [str(self._terms[mono])]
            if mono.pi_exp:
                factors.append(f"pi^{mono.pi_exp}")
            if mono.q_exp_doubled:
                factors.append(f"q^({mono.q_exp_doubled}/2)")
            factors.extend(f"{name}^{e}" for name, e in mono.frob_exps)
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"SymbolicScalar({self.to_text()})"


def parse_scalar(text: str, context: ScalarContext) -> SymbolicScalar:
    """Inverse of SymbolicScalar.to_text (also accepts plain sympy syntax)"""
    expr = sp.sympify(text.replace('^', '**'), locals={'pi': PI, 'q': Q})
    return SymbolicScalar(expr, context)


def valuation(s: SymbolicScalar):
    return s.valuation()


def reduce_mod_varpi(s: SymbolicScalar) -> SymbolicScalar:
    return s.reduce_mod_varpi()


def elementary_symmetric(d: int, values: Iterable) -> sp.Expr:
    """Degree-d elementary symmetric polynomial of the given expressions"""
    values = list(values)
    if d < 0 or d > len(values):
        return sp.Integer(0)
    # coefficient extraction from prod(1 + z*v)
    z = sp.Dummy('z')
    poly = sp.expand(sp.Mul(*[1 + z * v for v in values]))
    return sp.expand(poly.coeff(z, d))
