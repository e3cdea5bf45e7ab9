"""
SatakeForge - Symbolic Galois points

Ordinary points of U_sigma are stored by their diagonal data: characters
chi_i = ur_{t_i} prod_j omega_j^{e_{j,i}} with e_{j,i} = mu_{j,i} - (i - 1).
omega_j(Frob) is normalized to 1, so the Frobenius value of chi_i is t_i.

Indices i, the strata sets I and the orbit sets J are 1-based here, as in
the notation f-bar_i, U_{sigma,I}.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp

from bk_frobenius import F_tilde, lift_family
from errors import (
    DegenerateWeight, DimensionMismatch, IndexOutOfRange, InvalidPartition, NotRestricted, WeightNotRestricted,
)
from hecke import HeckeElt, ModPHeckeElt
from root_data import Weight
from scalars import PI, Q, ScalarContext, SymbolicScalar, frob_var
from tame_types import SerreWeight, combine_embeddings, principal_series_type_of, serre_weight

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TameCharacter:
    """ur_{frob_value} prod_j omega_j^{exponents[j]}"""
    exponents: Tuple[int, ...]
    frob_value: SymbolicScalar

    def __post_init__(self):
        object.__setattr__(self, 'exponents', tuple(int(x) for x in self.exponents))
        if not self.frob_value.is_monomial():
            raise DimensionMismatch(f"Frobenius value {self.frob_value.to_text()} is not a single monomial")
        if self.frob_value.valuation() < 0:
            raise DimensionMismatch(f"Frobenius value {self.frob_value.to_text()} has negative valuation")

    def inertial_exponent(self, p: int) -> int:
        """sum_j e_j p^{(f - j) mod f} mod q - 1"""
        f = len(self.exponents)
        return combine_embeddings([(x,) for x in self.exponents], p)[0] % (p ** f - 1)

    def to_dict(self) -> Dict:
        return {'exponents': list(self.exponents), 'frob': self.frob_value.to_text()}


@dataclass(frozen=True)
class OrdinaryPoint:
    """Diagonal data of a point of U_sigma"""
    characters: Tuple[TameCharacter, ...]
    sigma: SerreWeight

    def __post_init__(self):
        chars = tuple(self.characters)
        object.__setattr__(self, 'characters', chars)
        if len(chars) != self.sigma.n:
            raise DimensionMismatch(f"{len(chars)} characters for a weight with n={self.sigma.n}")
        for i, chi in enumerate(chars):
            expected = _ordinary_exponents(self.sigma, i)
            if chi.exponents != expected:
                raise DimensionMismatch(f"character {i + 1} has exponents {chi.exponents}, expected {expected}")

    @property
    def n(self) -> int:
        return self.sigma.n

    @property
    def context(self) -> ScalarContext:
        return self.characters[0].frob_value.context

    def frob_values(self) -> List[SymbolicScalar]:
        return [chi.frob_value for chi in self.characters]

    def to_dict(self) -> Dict:
        return {
            'sigma': self.sigma.to_dict(),
            'characters': [chi.to_dict() for chi in self.characters],
        }


def _ordinary_exponents(sigma: SerreWeight, i: int) -> Tuple[int, ...]:
    """(mu_j - w_0(eta))_i for 0-based i"""
    return tuple(comp[i] - i for comp in sigma.lambda_1.entries)


def _as_scalar(value, ctx: ScalarContext) -> SymbolicScalar:
    if isinstance(value, SymbolicScalar):
        return value
    if isinstance(value, str):
        value = sp.sympify(value.replace('^', '**'), locals={'pi': PI, 'q': Q})
    return SymbolicScalar(value, ctx)


def _check_sigma(sigma: SerreWeight, point: OrdinaryPoint):
    if point.sigma != sigma:
        raise DimensionMismatch(f"point lies on sigma={point.sigma.lambda_1.to_list()}, "
                                f"not {sigma.lambda_1.to_list()}")


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------

def ordinary_point(sigma: SerreWeight, t: Optional[Sequence] = None, e: int = 1) -> OrdinaryPoint:
    """
    The diagonal datum chi_i = ur_{t_i} prod_j omega_j^{mu_{j,i} - (i - 1)}.

    Raises:
        DegenerateWeight: chi_i chi_{i+1}^{-1} restricted to inertia is the
            cyclotomic character (gaps all 0 or all p - 1), where the point
            depends on extension data
    """
    ctx = ScalarContext(sigma.p, e, sigma.f)
    n = sigma.n
    values = list(t) if t is not None else [frob_var(i + 1) for i in range(n)]
    if len(values) != n:
        raise DimensionMismatch(f"{len(values)} Frobenius values for n={n}")

    mod = sigma.q - 1
    for i in range(n - 1):
        gaps = [comp[i] - comp[i + 1] for comp in sigma.lambda_1.entries]
        diff = combine_embeddings([(g + 1,) for g in gaps], sigma.p)[0]
        cyclo = combine_embeddings([(1,)] * sigma.f, sigma.p)[0]
        if (diff - cyclo) % mod == 0:
            raise DegenerateWeight(f"gaps {gaps} at position {i + 1} make chi_{i + 1}/chi_{i + 2} cyclotomic on inertia")

    chars = tuple(
        TameCharacter(_ordinary_exponents(sigma, i), _as_scalar(values[i], ctx))
        for i in range(n)
    )
    return OrdinaryPoint(chars, sigma)


def point_from_spec(sigma: SerreWeight, spec: Mapping, e: int = 1) -> OrdinaryPoint:
    """[point] table: t = ["t1", "t2", ...]"""
    return ordinary_point(sigma, spec.get('t'), e)


def specialize(point: OrdinaryPoint, substitutions: Mapping) -> OrdinaryPoint:
    """Substitute into the Frobenius values; results must stay monomials of valuation >= 0"""
    ctx = point.context
    mapping = {}
    for key, value in substitutions.items():
        sym = sp.Symbol(key) if isinstance(key, str) else key
        mapping[sym] = _as_scalar(value, ctx).expr
    chars = tuple(replace(chi, frob_value=chi.frob_value.subs(mapping)) for chi in point.characters)
    return replace(point, characters=chars)


def S_sigma_on_points(point: OrdinaryPoint) -> List[TameCharacter]:
    """Undo the twist by -w_0(eta): exponents become mu_{j,i}"""
    return [
        TameCharacter(tuple(x + i for x in chi.exponents), chi.frob_value)
        for i, chi in enumerate(point.characters)
    ]


def same_semisimplification(x: OrdinaryPoint, y: OrdinaryPoint) -> bool:
    """Equal multisets of (inertial exponent, Frobenius value)"""
    p = x.sigma.p

    def key(point: OrdinaryPoint):
        return sorted((chi.inertial_exponent(p), chi.frob_value.to_text()) for chi in point.characters)

    return x.n == y.n and key(x) == key(y)


# ---------------------------------------------------------------------------
# Evaluation maps
# ---------------------------------------------------------------------------

def torus_eval(point: Union[OrdinaryPoint, Sequence[TameCharacter]],
               h: Union[HeckeElt, sp.Expr, str]) -> SymbolicScalar:
    """x_i -> Frobenius value of the i-th character"""
    chars = list(point.characters if isinstance(point, OrdinaryPoint) else point)
    ctx = chars[0].frob_value.context
    xs = [sp.Symbol(f"x{i + 1}") for i in range(len(chars))]
    if isinstance(h, HeckeElt):
        expr = h.to_expr()
    elif isinstance(h, str):
        expr = sp.sympify(h.replace('^', '**'), locals={'pi': PI, 'q': Q, **{str(x): x for x in xs}})
    else:
        expr = sp.sympify(h)
    expr = expr.subs({x: chi.frob_value.expr for x, chi in zip(xs, chars)}, simultaneous=True)
    return SymbolicScalar(expr, ctx)


def eval_fbar(sigma: SerreWeight, i: int, point: OrdinaryPoint) -> SymbolicScalar:
    """f-bar_i(rho-bar) = prod_{k <= i} chi_k(Frob)"""
    _check_sigma(sigma, point)
    if not (1 <= i <= sigma.n):
        raise IndexOutOfRange(f"i={i} not in [1, {sigma.n}]")
    value = SymbolicScalar.one(point.context)
    for chi in point.characters[:i]:
        value = value * chi.frob_value
    return value


def psi_bar_eval(sigma: SerreWeight, h: ModPHeckeElt, point: OrdinaryPoint) -> SymbolicScalar:
    """y_i -> f-bar_i, coefficients in F_p"""
    _check_sigma(sigma, point)
    if h.n != sigma.n or h.p != sigma.p:
        raise DimensionMismatch(f"mod p Hecke element of (n, p)=({h.n}, {h.p}) for sigma of ({sigma.n}, {sigma.p})")
    fbar = [eval_fbar(sigma, i + 1, point) for i in range(sigma.n)]
    total = SymbolicScalar.zero(point.context)
    for exps, c in h.terms.items():
        term = SymbolicScalar(c, point.context)
        for value, k in zip(fbar, exps):
            term = term * value ** k
        total = total + term
    return total


def crystalline_lift_eval(sigma: SerreWeight, I_set: Iterable[int], t_tilde: Optional[Sequence] = None,
                          e: int = 1) -> SymbolicScalar:
    """
    F-tilde_I at the crystalline lift of type tau(1, mu) with Frobenius eigenvalues q^{i-1} tt_i.

    Computed from the lift family, so it equals
    q^{-d(d-1)/2} prod_{i in I} q^{i-1} tt_i with d = #I.
    """
    t = principal_series_type_of(sigma, e)
    n = sigma.n
    values = list(t_tilde) if t_tilde is not None else [frob_var(i + 1, lift=True) for i in range(n)]
    if len(values) != n:
        raise DimensionMismatch(f"{len(values)} lift values for n={n}")
    fam = lift_family(t, [values[t.relabel[k]] for k in range(n)])

    new_index = {old: k for k, old in enumerate(t.relabel)}
    classes = []
    for i in sorted(set(I_set)):
        if not (1 <= i <= n):
            raise IndexOutOfRange(f"index {i} not in [1, {n}]")
        classes.append(t.class_of_orbit(t.orbit_of(new_index[i - 1])))
    return F_tilde(fam, classes, [1] * len(classes))


# ---------------------------------------------------------------------------
# Strata and Levi images
# ---------------------------------------------------------------------------

def _check_strata_set(sigma: SerreWeight, I_set: Iterable[int]) -> List[int]:
    ids = sorted(set(I_set))
    if any(not (1 <= i <= sigma.n - 1) for i in ids):
        raise InvalidPartition(f"{ids} is not a subset of {{1..{sigma.n - 1}}}")
    return ids


def strata_membership(sigma: SerreWeight, point: OrdinaryPoint, I_set: Iterable[int]) -> bool:
    """point lies in U_{sigma,I}: f-bar_i does not vanish mod varpi for i in I"""
    return all(
        not eval_fbar(sigma, i, point).reduce_mod_varpi().is_zero()
        for i in _check_strata_set(sigma, I_set)
    )


def stratum_label(sigma: SerreWeight, point: OrdinaryPoint) -> Tuple[int, ...]:
    """The i in {1..n-1} with f-bar_i nonzero at the point"""
    return tuple(i for i in range(1, sigma.n) if strata_membership(sigma, point, [i]))


def is_supersingular(sigma: SerreWeight, point: OrdinaryPoint) -> bool:
    return not stratum_label(sigma, point)


def _blocks(n: int, I_set: Sequence[int]) -> List[Tuple[int, int]]:
    """(offset, size) of the blocks (i_{k-1}, i_k]"""
    cuts = [0] + list(I_set) + [n]
    return [(a, b - a) for a, b in zip(cuts, cuts[1:])]


def levi_image(sigma: SerreWeight, point: OrdinaryPoint, I_set: Iterable[int]) -> List[Tuple[SerreWeight, OrdinaryPoint]]:
    """
    Split the point into its blocks for M_I = prod GL_{i_k - i_{k-1}}.

    The block at offset o solves e_{j,o+k} = mu'_{j,k} - k with its own w_0(eta),
    so mu'_{j,k} = mu_{j,o+k} - o: the restriction of mu twisted by det^{-o}.
    Each returned point equals ordinary_point(sigma_k, block Frobenius values).

    Raises:
        WeightNotRestricted: a solved block weight leaves the restricted region
    """
    _check_sigma(sigma, point)
    ids = _check_strata_set(sigma, I_set)
    if not strata_membership(sigma, point, ids):
        raise DegenerateWeight(f"point does not lie in U_sigma,I for I={ids}")

    out = []
    for offset, size in _blocks(sigma.n, ids):
        chars = point.characters[offset:offset + size]
        entries = tuple(
            tuple(chars[k].exponents[j] + k for k in range(size))
            for j in range(sigma.f)
        )
        try:
            block_sigma = serre_weight(sigma.p, sigma.f, size, Weight(entries))
        except NotRestricted as e:
            raise WeightNotRestricted(f"block at offset {offset}: {e}")
        out.append((block_sigma, OrdinaryPoint(chars, block_sigma)))
    logger.debug(f"levi image for I={ids}: {len(out)} blocks")
    return out


def reassemble_levi(blocks: Sequence[Tuple[SerreWeight, OrdinaryPoint]]) -> OrdinaryPoint:
    """
    Inverse of levi_image: undo the det^{-o} twist of every block and concatenate.

    Raises:
        WeightNotRestricted: the gap between two adjacent blocks leaves [0, p - 1]
    """
    if not blocks:
        raise InvalidPartition("no blocks to reassemble")
    p, f = blocks[0][0].p, blocks[0][0].f
    entries = [[] for _ in range(f)]
    chars: List[TameCharacter] = []
    for block_sigma, block_point in blocks:
        _check_sigma(block_sigma, block_point)
        offset = len(chars)
        for j in range(f):
            entries[j].extend(x + offset for x in block_sigma.lambda_1.entries[j])
        chars.extend(block_point.characters)
    try:
        sigma = serre_weight(p, f, len(chars), Weight(tuple(tuple(c) for c in entries)))
    except NotRestricted as e:
        raise WeightNotRestricted(f"blocks do not reassemble to a restricted weight: {e}")
    return OrdinaryPoint(tuple(chars), sigma)


def glob_func_restriction(sigma: SerreWeight, J: Iterable[int], point: OrdinaryPoint) -> SymbolicScalar:
    """
    R(F-tilde_J) at the point: the reduced lift value with tt_i -> t_i, evaluated at
    the point's Frobenius values. This is f-bar_m for J = {1..m} and 0 otherwise.
    """
    _check_sigma(sigma, point)
    ids = sorted(set(J))
    residue = crystalline_lift_eval(sigma, ids, e=point.context.e).reduce_mod_varpi()
    mapping = {frob_var(i + 1): chi.frob_value.expr for i, chi in enumerate(point.characters)}
    return SymbolicScalar(residue.expr, point.context).subs(mapping)


def fail_example_points(sigma: SerreWeight, i: int, t: Optional[Sequence] = None,
                        e: int = 1) -> Tuple[OrdinaryPoint, OrdinaryPoint]:
    """
    Points rho-bar, rho-bar' with t_i and t_{i+1} interchanged, for a gap of p - 2 at i.

    Both have the same semisimplification while f-bar_i differs by t_{i+1}/t_i.

    Raises:
        DegenerateWeight: the gap at i is not p - 2 in every embedding
    """
    n = sigma.n
    if not (1 <= i <= n - 1):
        raise IndexOutOfRange(f"i={i} not in [1, {n - 1}]")
    gaps = [comp[i - 1] - comp[i] for comp in sigma.lambda_1.entries]
    if any(g != sigma.p - 2 for g in gaps):
        raise DegenerateWeight(f"gaps {gaps} at position {i} are not all p - 2 = {sigma.p - 2}")
    values = list(t) if t is not None else [frob_var(k + 1) for k in range(n)]
    swapped = list(values)
    swapped[i - 1], swapped[i] = values[i], values[i - 1]
    return ordinary_point(sigma, values, e), ordinary_point(sigma, swapped, e)
