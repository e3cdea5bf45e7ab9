"""
SatakeForge - Hecke algebras of tame types

Hecke elements are represented by their images in the Laurent polynomial ring
in variables x_I (one per s_tau-orbit I), where x_I is the image of T_{-eps_I}.
Integral structure is bookkeeping on normalizations of monomials; the mod p
algebra is written in Satake coordinates y_i = x_1 ... x_i.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp

from errors import (
    DegreeOutOfRange, DimensionMismatch, IndexOutOfRange, InvalidExponent, InvalidOrder,
    NotCentral, NotIntegral, NotSymmetric,
)
from root_data import Weight, normalize_blocks, positive_roots
from scalars import PI, Q, ScalarContext, SymbolicScalar, elementary_symmetric, laurent_terms
from tame_types import SerreWeight, TameInertialType, sw_predicates

logger = logging.getLogger(__name__)

Exps = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Level data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelData:
    """Orbit partition P_tau and its classes, as 0-based index tuples"""
    p: int
    n: int
    orbits: Tuple[Tuple[int, ...], ...]
    classes: Tuple[Tuple[int, ...], ...]
    e: int = 1
    f: int = 1

    def __post_init__(self):
        normalize_blocks(self.n, [[i + 1 for i in orb] for orb in self.orbits])
        flat = sorted(k for c in self.classes for k in c)
        if flat != list(range(len(self.orbits))):
            raise DimensionMismatch(f"classes {self.classes} do not partition the {len(self.orbits)} orbits")
        for c in self.classes:
            if len({len(self.orbits[k]) for k in c}) != 1:
                raise DimensionMismatch(f"orbits of class {c} have different sizes")

    @classmethod
    def from_sizes(cls, p: int, sizes: Sequence[int], classes=None, e: int = 1, f: int = 1) -> 'LevelData':
        orbits, start = [], 0
        for s in sizes:
            orbits.append(tuple(range(start, start + s)))
            start += s
        if classes is None:
            classes = [(k,) for k in range(len(orbits))]
        return cls(p=p, n=start, orbits=tuple(orbits), classes=tuple(tuple(c) for c in classes), e=e, f=f)

    @classmethod
    def principal_series(cls, p: int, n: int, classes=None, e: int = 1, f: int = 1) -> 'LevelData':
        return cls.from_sizes(p, [1] * n, classes=classes, e=e, f=f)

    @property
    def context(self) -> ScalarContext:
        return ScalarContext(self.p, self.e, self.f)

    @property
    def variables(self) -> Tuple[sp.Symbol, ...]:
        return tuple(sp.Symbol(f"x{k + 1}") for k in range(len(self.orbits)))

    @property
    def num_orbits(self) -> int:
        return len(self.orbits)

    def orbit_size(self, k: int) -> int:
        return len(self.orbits[k])

    def is_regular(self) -> bool:
        return all(len(c) == 1 for c in self.classes)

    def cocharacter(self, c: Sequence[int]) -> Tuple[int, ...]:
        """sum_I c_I eps_I as an n-vector"""
        out = [0] * self.n
        for k, orbit in enumerate(self.orbits):
            for i in orbit:
                out[i] = c[k]
        return tuple(out)


def type_level(t: TameInertialType) -> LevelData:
    return LevelData(p=t.p, n=t.n, orbits=t.orbits, classes=t.classes, e=t.e, f=t.f)


# ---------------------------------------------------------------------------
# Normalization exponents
# ---------------------------------------------------------------------------

def product_exponent(c: Sequence[int], level: LevelData) -> int:
    """E(c) = sum_{I<J} min(c_I, c_J) #I #J"""
    return sum(
        min(c[a], c[b]) * level.orbit_size(a) * level.orbit_size(b)
        for a, b in itertools.combinations(range(level.num_orbits), 2)
    )


def pi_exponent(c: Sequence[int], level: LevelData, lam: Optional[Weight]) -> int:
    """m(c) = sum over embeddings of <lambda, ascending sort of sum c_I eps_I>"""
    if lam is None:
        return 0
    if lam.n != level.n:
        raise DimensionMismatch(f"lambda has n={lam.n}, level has n={level.n}")
    mu = sorted(level.cocharacter(c))
    return sum(sum(a * b for a, b in zip(comp, mu)) for comp in lam.entries)


def _last_entries(lam: Optional[Weight], k: int) -> int:
    if lam is None or k == 0:
        return 0
    return sum(sum(comp[-k:]) for comp in lam.entries)


def n_of(I_set: Iterable[int], level: LevelData) -> int:
    """#U(#U - 1)/2 - sum #I(#I - 1)/2 for U the union of the orbits"""
    sizes = [level.orbit_size(k) for k in I_set]
    total = sum(sizes)
    return total * (total - 1) // 2 - sum(s * (s - 1) // 2 for s in sizes)


def n_lambda_of(I_set: Iterable[int], lam: Optional[Weight], level: LevelData) -> int:
    """sum_j <lambda_j, w_0 omega_{#U}> - sum_I <lambda_j, w_0 omega_{#I}>"""
    sizes = [level.orbit_size(k) for k in I_set]
    return _last_entries(lam, sum(sizes)) - sum(_last_entries(lam, s) for s in sizes)


def _q(doubled: int, ctx: ScalarContext) -> SymbolicScalar:
    return SymbolicScalar.q_power(doubled, ctx)


def _size(I) -> int:
    return I if isinstance(I, int) else len(I)


def T_inverse_scalar(I, n: int, context: ScalarContext) -> SymbolicScalar:
    """T_{eps_I}^{-1} = q^{-#I(n - #I)} T_{-eps_I}"""
    k = _size(I)
    return _q(-2 * k * (n - k), context)


def tP_image_scalar(I, n: int, context: ScalarContext) -> SymbolicScalar:
    """t_P(t_{eps_I}) = q^{-#I(n - #I)/2} T_{eps_I}"""
    k = _size(I)
    return _q(-k * (n - k), context)


def product_formula_scalar(c: Sequence[int], order: Sequence[int], level: LevelData) -> SymbolicScalar:
    """
    q-power with prod_I T_{-eps_I}^{c_I} = q^{...} T_{-mu}.

    Args:
        c: exponent per orbit (0-based orbit index)
        order: orbits listed so that c is weakly increasing along it
    """
    if sorted(order) != list(range(level.num_orbits)):
        raise InvalidOrder(f"{order} is not a total order on the {level.num_orbits} orbits")
    for a, b in zip(order, order[1:]):
        if c[a] > c[b]:
            raise InvalidOrder(f"c_{a + 1}={c[a]} > c_{b + 1}={c[b]} but orbit {a + 1} precedes {b + 1}")
    exponent = 0
    for pos, k in enumerate(order):
        later = sum(level.orbit_size(j) for j in order[pos + 1:])
        exponent += c[k] * level.orbit_size(k) * later
    return _q(2 * exponent, level.context)


# ---------------------------------------------------------------------------
# Convolution of T_mu
# ---------------------------------------------------------------------------

def _as_vector(mu) -> Tuple[int, ...]:
    if isinstance(mu, Weight):
        if mu.f != 1:
            raise DimensionMismatch("conv_TT works with a single embedding component")
        return mu.entries[0]
    return tuple(int(x) for x in mu)


def _check_central(mu: Sequence[int], level: LevelData):
    for orbit in level.orbits:
        if len({mu[i] for i in orbit}) != 1:
            raise NotCentral(f"{list(mu)} is not constant on orbit {[i + 1 for i in orbit]}")


def _split_dom_antidom(mu: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """mu = plus + minus with plus dominant and minus antidominant"""
    n = len(mu)
    plus, minus = [0] * n, [0] * n
    plus[-1], minus[-1] = max(mu[-1], 0), min(mu[-1], 0)
    for i in range(n - 2, -1, -1):
        d = mu[i] - mu[i + 1]
        plus[i] = plus[i + 1] + max(d, 0)
        minus[i] = minus[i + 1] + min(d, 0)
    return tuple(plus), tuple(minus)


def _dom_antidom_exponent(dom: Sequence[int], anti: Sequence[int], level: LevelData) -> int:
    block = {i: k for k, orb in enumerate(level.orbits) for i in orb}
    total = [a + b for a, b in zip(dom, anti)]
    exponent = 0
    for i, k in positive_roots(level.n):
        if block[i - 1] == block[k - 1]:
            continue
        exponent += (dom[i - 1] - dom[k - 1]) - max(total[i - 1] - total[k - 1], 0)
    return exponent


def conv_TT(mu1, mu2, level: LevelData) -> Tuple[SymbolicScalar, Weight]:
    """
    T_{mu1} T_{mu2} = scalar * T_{mu1 + mu2} for mu1, mu2 central in the Levi of the level.

    Pairs outside the (dominant, antidominant) cases are reduced to them by
    splitting each cocharacter into a dominant and an antidominant part.
    """
    a, b = _as_vector(mu1), _as_vector(mu2)
    if len(a) != level.n or len(b) != level.n:
        raise DimensionMismatch(f"cocharacters must have {level.n} entries")
    _check_central(a, level)
    _check_central(b, level)

    a_plus, a_minus = _split_dom_antidom(a)
    b_plus, b_minus = _split_dom_antidom(b)
    sum_plus = tuple(x + y for x, y in zip(a_plus, b_plus))
    sum_minus = tuple(x + y for x, y in zip(a_minus, b_minus))
    exponent = (
        _dom_antidom_exponent(sum_plus, sum_minus, level)
        - _dom_antidom_exponent(a_plus, a_minus, level)
        - _dom_antidom_exponent(b_plus, b_minus, level)
    )
    total = Weight((tuple(x + y for x, y in zip(a, b)),))
    return _q(2 * exponent, level.context), total


# ---------------------------------------------------------------------------
# Hecke elements
# ---------------------------------------------------------------------------

class HeckeElt:
    """
    Laurent polynomial in x_1, ..., x_k over SymbolicScalar.

    Args:
        level: LevelData giving the variables and the class symmetry
        terms: {exponent tuple: SymbolicScalar}
        symmetric_flag: whether the element is declared class-symmetric
    """

    __slots__ = ('level', '_terms', 'symmetric_flag')

    def __init__(self, level: LevelData, terms: Mapping[Exps, SymbolicScalar], symmetric_flag: bool = False):
        clean = {}
        for exps, coeff in terms.items():
            if len(exps) != level.num_orbits:
                raise DimensionMismatch(f"monomial {exps} has the wrong number of variables")
            if not coeff.is_zero():
                clean[tuple(exps)] = coeff
        object.__setattr__(self, 'level', level)
        object.__setattr__(self, '_terms', clean)
        object.__setattr__(self, 'symmetric_flag', symmetric_flag)

    def __setattr__(self, name, value):
        raise AttributeError("HeckeElt is immutable")

    @classmethod
    def from_expr(cls, expr, level: LevelData, symmetric_flag: bool = False) -> 'HeckeElt':
        ctx = level.context
        terms = {
            exps: SymbolicScalar(coeff, ctx)
            for exps, coeff in laurent_terms(sp.sympify(expr), level.variables).items()
        }
        return cls(level, terms, symmetric_flag)

    @classmethod
    def monomial(cls, level: LevelData, exps: Sequence[int], coeff=1) -> 'HeckeElt':
        scalar = coeff if isinstance(coeff, SymbolicScalar) else SymbolicScalar(coeff, level.context)
        return cls(level, {tuple(exps): scalar})

    @classmethod
    def zero(cls, level: LevelData) -> 'HeckeElt':
        return cls(level, {}, True)

    @classmethod
    def one(cls, level: LevelData) -> 'HeckeElt':
        return cls(level, {(0,) * level.num_orbits: SymbolicScalar.one(level.context)}, True)

    @property
    def terms(self) -> Dict[Exps, SymbolicScalar]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _check(self, other: 'HeckeElt'):
        if other.level != self.level:
            raise DimensionMismatch("Hecke elements of different levels")

    def __add__(self, other: 'HeckeElt') -> 'HeckeElt':
        self._check(other)
        out = dict(self._terms)
        for exps, c in other._terms.items():
            out[exps] = out[exps] + c if exps in out else c
        return HeckeElt(self.level, out, self.symmetric_flag and other.symmetric_flag)

    def __neg__(self) -> 'HeckeElt':
        return HeckeElt(self.level, {k: -v for k, v in self._terms.items()}, self.symmetric_flag)

    def __sub__(self, other: 'HeckeElt') -> 'HeckeElt':
        return self + (-other)

    def __mul__(self, other) -> 'HeckeElt':
        if not isinstance(other, HeckeElt):
            scalar = other if isinstance(other, SymbolicScalar) else SymbolicScalar(other, self.level.context)
            return HeckeElt(self.level, {k: v * scalar for k, v in self._terms.items()}, self.symmetric_flag)
        self._check(other)
        out: Dict[Exps, SymbolicScalar] = {}
        for (e1, c1), (e2, c2) in itertools.product(self._terms.items(), other._terms.items()):
            exps = tuple(a + b for a, b in zip(e1, e2))
            prod = c1 * c2
            out[exps] = out[exps] + prod if exps in out else prod
        return HeckeElt(self.level, out, self.symmetric_flag and other.symmetric_flag)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> 'HeckeElt':
        if k < 0:
            if len(self._terms) != 1:
                raise ValueError("Only monomials can be inverted")
            (exps, c), = self._terms.items()
            return HeckeElt(self.level, {tuple(a * k for a in exps): c ** k}, self.symmetric_flag)
        out = HeckeElt.one(self.level)
        for _ in range(k):
            out = out * self
        return HeckeElt(self.level, out._terms, self.symmetric_flag)

    def __eq__(self, other):
        if not isinstance(other, HeckeElt):
            return NotImplemented
        return self.level == other.level and self._terms == other._terms

    def __hash__(self):
        return hash((self.level, frozenset(self._terms.items())))

    def is_symmetric(self) -> bool:
        """Invariant under swapping any two orbit variables of the same class"""
        for members in self.level.classes:
            for a, b in zip(members, members[1:]):
                for exps, c in self._terms.items():
                    swapped = list(exps)
                    swapped[a], swapped[b] = swapped[b], swapped[a]
                    if self._terms.get(tuple(swapped)) != c:
                        return False
        return True

    def to_expr(self) -> sp.Expr:
        xs = self.level.variables
        return sp.Add(*[c.expr * sp.Mul(*[x ** e for x, e in zip(xs, exps)]) for exps, c in self._terms.items()])

    def to_text(self) -> str:
        """Canonical rendering: (scalar) * x1^a * x2^b + ..."""
        if not self._terms:
            return "0"
        parts = []
        for exps in sorted(self._terms):
            factors = [f"({self._terms[exps].to_text()})"]
            factors.extend(f"x{k + 1}^{e}" for k, e in enumerate(exps) if e)
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"HeckeElt({self.to_text()})"


def parse_hecke(text: str, level: LevelData, symmetric_flag: bool = True) -> HeckeElt:
    """Read a Hecke element written in pi, q and x1..xk (either ^ or ** for powers)"""
    names = {'pi': PI, 'q': Q}
    names.update({str(x): x for x in level.variables})
    expr = sp.sympify(text.replace('^', '**'), locals=names)
    return HeckeElt.from_expr(expr, level, symmetric_flag)


# ---------------------------------------------------------------------------
# Generators and integrality
# ---------------------------------------------------------------------------

def normalized_coefficient(exps: Sequence[int], coeff: SymbolicScalar, level: LevelData,
                           lam: Optional[Weight] = None) -> SymbolicScalar:
    """coeff * q^{E(c)} * pi^{m(c)}: the coefficient against the integral basis element"""
    ctx = level.context
    return coeff * _q(2 * product_exponent(exps, level), ctx) * SymbolicScalar(PI ** pi_exponent(exps, level, lam), ctx)


def _is_integral_scalar(s: SymbolicScalar) -> bool:
    return all(m.pi_exp >= 0 and m.q_exp_doubled >= 0 for m in s.terms)


def integral_membership(h: HeckeElt, lam: Optional[Weight] = None) -> bool:
    """True iff h lies in the integral Hecke algebra (optionally of weight lambda)"""
    if not h.symmetric_flag or not h.is_symmetric():
        raise NotSymmetric(f"{h.to_text()} is not invariant under the class permutations")
    return all(
        _is_integral_scalar(normalized_coefficient(exps, c, h.level, lam))
        for exps, c in h.terms.items()
    )


def T_orbit_set(level: LevelData, orbit_ids: Iterable[int], lam: Optional[Weight] = None) -> HeckeElt:
    """T_J = pi^{-m} q^{-n(J)} x_J"""
    ids = sorted(set(orbit_ids))
    if any(not (0 <= k < level.num_orbits) for k in ids):
        raise IndexOutOfRange(f"orbit indices {ids} out of range")
    exps = tuple(1 if k in ids else 0 for k in range(level.num_orbits))
    ctx = level.context
    coeff = _q(-2 * n_of(ids, level), ctx) * SymbolicScalar(PI ** -pi_exponent(exps, level, lam), ctx)
    return HeckeElt.monomial(level, exps, coeff)


def generator(level: LevelData, lam: Optional[Weight], Ibar_set: Iterable[int], d) -> HeckeElt:
    """
    Normalized generator pi^{-m} q^{-n(S)} prod_{Ibar} sym_{d_Ibar}(x_I : I in Ibar).

    Args:
        Ibar_set: class indices (0-based)
        d: degree per class, as a mapping class -> degree or a sequence aligned with Ibar_set
    """
    classes = list(Ibar_set)
    degrees = {c: d[c] for c in classes} if isinstance(d, Mapping) else dict(zip(classes, d))
    if len(degrees) != len(classes):
        raise DegreeOutOfRange(f"need one degree per class, got {d}")

    xs = level.variables
    poly = sp.Integer(1)
    union_orbits: List[int] = []
    for c in classes:
        if not (0 <= c < len(level.classes)):
            raise IndexOutOfRange(f"class index {c} out of range")
        members = level.classes[c]
        deg = degrees[c]
        if not (1 <= deg <= len(members)):
            raise DegreeOutOfRange(f"d={deg} for a class of {len(members)} orbits")
        poly *= elementary_symmetric(deg, [xs[k] for k in members])
        union_orbits.extend(members[:deg])

    ctx = level.context
    size = sum(level.orbit_size(k) for k in union_orbits)
    coeff = _q(-2 * n_of(union_orbits, level), ctx) * SymbolicScalar(PI ** -_last_entries(lam, size), ctx)
    return HeckeElt.from_expr(sp.expand(poly), level, True) * coeff


def inverse_generator(level: LevelData, lam: Optional[Weight] = None) -> HeckeElt:
    """pi^{sum lambda} q^{n(P_tau)} x_{P_tau}^{-1}"""
    ctx = level.context
    all_orbits = range(level.num_orbits)
    coeff = _q(2 * n_of(all_orbits, level), ctx) * SymbolicScalar(PI ** _last_entries(lam, level.n), ctx)
    h = HeckeElt.monomial(level, (-1,) * level.num_orbits, coeff)
    return HeckeElt(level, h.terms, True)


def _degree_choices(level: LevelData, classes: Sequence[int]):
    return itertools.product(*[range(1, len(level.classes[c]) + 1) for c in classes])


def presentation_table(level: LevelData, lam: Optional[Weight] = None) -> List[Dict]:
    """Every generator (class set, degrees) with its normalized image"""
    rows = []
    n_classes = len(level.classes)
    for size in range(1, n_classes + 1):
        for classes in itertools.combinations(range(n_classes), size):
            for degrees in _degree_choices(level, classes):
                h = generator(level, lam, classes, degrees)
                rows.append({
                    'classes': ",".join(str(c + 1) for c in classes),
                    'degrees': ",".join(str(d) for d in degrees),
                    'image': h.to_text(),
                    'integral': integral_membership(h, lam),
                })
    inv = inverse_generator(level, lam)
    rows.append({'classes': 'all', 'degrees': '-1', 'image': inv.to_text(), 'integral': integral_membership(inv, lam)})
    return rows


# ---------------------------------------------------------------------------
# Mod p Hecke algebra in Satake coordinates
# ---------------------------------------------------------------------------

class ModPHeckeElt:
    """Polynomial in y_1..y_{n-1}, Laurent in y_n, coefficients in F_p"""

    __slots__ = ('n', 'p', '_terms')

    def __init__(self, n: int, p: int, terms: Mapping[Exps, int]):
        clean = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise DimensionMismatch(f"y-monomial {exps} needs {n} exponents")
            if any(e < 0 for e in exps[:-1]):
                raise InvalidExponent(f"only y_{n} may carry a negative exponent: {exps}")
            c %= p
            if c:
                clean[exps] = (clean.get(exps, 0) + c) % p
        object.__setattr__(self, 'n', n)
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, '_terms', {k: v for k, v in clean.items() if v})

    def __setattr__(self, name, value):
        raise AttributeError("ModPHeckeElt is immutable")

    @classmethod
    def y(cls, i: int, n: int, p: int) -> 'ModPHeckeElt':
        """y_i (1-based)"""
        if not (1 <= i <= n):
            raise IndexOutOfRange(f"y_{i} with n={n}")
        return cls(n, p, {tuple(1 if k == i - 1 else 0 for k in range(n)): 1})

    @classmethod
    def zero(cls, n: int, p: int) -> 'ModPHeckeElt':
        return cls(n, p, {})

    @property
    def terms(self) -> Dict[Exps, int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: 'ModPHeckeElt') -> 'ModPHeckeElt':
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return ModPHeckeElt(self.n, self.p, out)

    def __mul__(self, other: 'ModPHeckeElt') -> 'ModPHeckeElt':
        if (self.n, self.p) != (other.n, other.p):
            raise DimensionMismatch("mod p Hecke elements of different (n, p)")
        out: Dict[Exps, int] = {}
        for (e1, c1), (e2, c2) in itertools.product(self._terms.items(), other._terms.items()):
            exps = tuple(a + b for a, b in zip(e1, e2))
            out[exps] = out.get(exps, 0) + c1 * c2
        return ModPHeckeElt(self.n, self.p, out)

    def __eq__(self, other):
        if not isinstance(other, ModPHeckeElt):
            return NotImplemented
        return (self.n, self.p, self._terms) == (other.n, other.p, other._terms)

    def __hash__(self):
        return hash((self.n, self.p, frozenset(self._terms.items())))

    def to_expr(self) -> sp.Expr:
        ys = [sp.Symbol(f"y{i + 1}") for i in range(self.n)]
        return sp.Add(*[c * sp.Mul(*[y ** e for y, e in zip(ys, exps)]) for exps, c in self._terms.items()])

    def to_x_expr(self) -> sp.Expr:
        """Rewrite in torus coordinates y_i = x_1 ... x_i"""
        xs = [sp.Symbol(f"x{i + 1}") for i in range(self.n)]
        ys = {sp.Symbol(f"y{i + 1}"): sp.Mul(*xs[:i + 1]) for i in range(self.n)}
        return sp.expand(self.to_expr().subs(ys, simultaneous=True))

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps in sorted(self._terms):
            factors = [str(self._terms[exps])] + [f"y{i + 1}^{e}" for i, e in enumerate(exps) if e]
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"ModPHeckeElt({self.to_text()})"


def satake_generators(n: int, p: int) -> List[ModPHeckeElt]:
    """Images y_1, ..., y_n of T-bar_{-omega_i}"""
    return [ModPHeckeElt.y(i, n, p) for i in range(1, n + 1)]


def reduction_map(level: LevelData, h: HeckeElt, sigma_data: Optional[SerreWeight] = None,
                  lam: Optional[Weight] = None) -> ModPHeckeElt:
    """
    Reduce an integral Hecke element to the mod p Hecke algebra.

    x^c goes to reduce(normalized coefficient) * prod y_i^{mu_i - mu_{i+1}} when
    mu = sum c_I eps_I is weakly decreasing (so -mu is antidominant), else to 0.

    Raises:
        NotIntegral: a normalized coefficient has a negative pi or q exponent
        UnitAmbiguity: propagated from the coefficient reduction
    """
    if sigma_data is not None:
        blocks = [[i + 1 for i in orb] for orb in level.orbits]
        if not sw_predicates(sigma_data, blocks, 0).M_regular:
            logger.warning(f"⚠️  sigma={sigma_data.lambda_1.to_list()} is not M-regular for this level")
    n, p = level.n, level.p
    out: Dict[Exps, int] = {}
    for exps, coeff in h.terms.items():
        normalized = normalized_coefficient(exps, coeff, level, lam)
        if not _is_integral_scalar(normalized):
            raise NotIntegral(f"coefficient {normalized.to_text()} of x^{exps} is not integral")
        mu = level.cocharacter(exps)
        if any(mu[i] < mu[i + 1] for i in range(n - 1)):
            continue
        residue = normalized.reduce_mod_varpi()
        if residue.is_zero():
            continue
        if not residue.expr.is_Integer:
            raise NotIntegral(f"residue {residue.to_text()} is not a constant of the prime field")
        y_exps = tuple(mu[i] - mu[i + 1] for i in range(n - 1)) + (mu[-1],)
        out[y_exps] = out.get(y_exps, 0) + int(residue.expr)
    return ModPHeckeElt(n, p, out)


# ---------------------------------------------------------------------------
# Galois side
# ---------------------------------------------------------------------------

def galois_dictionary(h: HeckeElt, wd: Mapping[int, Union[SymbolicScalar, sp.Expr, int]]) -> SymbolicScalar:
    """Evaluate h at x_I = q^{-#I(#I-1)/2} det phi_I(Frob), wd keyed by 0-based orbit index"""
    level = h.level
    ctx = level.context
    values = []
    for k in range(level.num_orbits):
        if k not in wd:
            raise IndexOutOfRange(f"no Weil-Deligne value for orbit {k + 1}")
        det = wd[k] if isinstance(wd[k], SymbolicScalar) else SymbolicScalar(wd[k], ctx)
        s = level.orbit_size(k)
        values.append(_q(-s * (s - 1), ctx) * det)
    total = SymbolicScalar.zero(ctx)
    for exps, coeff in h.terms.items():
        term = coeff
        for v, e in zip(values, exps):
            term = term * v ** e
        total = total + term
    return total
