"""
SatakeForge - Partial Frobenius families

A family is a tuple of n x n matrices A^{(j)}, j = 0..f-1, whose entries are
polynomials in v of degree < trunc with coefficients built from pi, q and the
Frobenius variables. Each A^{(j)} is written in the sorted coordinates of the
orientation s_or,j: reduced mod v it is block upper triangular, the blocks
being the index classes (equal exponents) in descending exponent order.

The Frobenius matrix of a family is F = P_{s_tau}^{-1} prod_{j=f-1}^{0}
Ad(s_or,j)(Levi part of A^{(j)} mod v). The global functions f_{Ibar,d} are
read off the class blocks of F^{#I}.
"""

import itertools
import logging
import math
import random
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy as sp

from errors import (
    ConfigError, DegreeOutOfRange, DimensionMismatch, IndexOutOfRange, InvalidPermutation, NonRegularDigits, NotBlockScalar,
    NotFactorizable, NotInParabolic, ShapeIdentityFailure, TruncationOverflow,
)
from root_data import (
    ExtAffWeylElt, Perm, Presentation, Weight, act, act_weight, compose, dot_action, eta,
    inverse, is_in_C0, levi_decompose, permutation_matrix, twist_presentation,
)
from scalars import PI, Q, ScalarContext, SymbolicScalar, elementary_symmetric, frob_var, laurent_terms
from tame_types import (
    TameInertialType, build_type, extend_orientation, presentation_for_orientation, valid_orientations,
)

logger = logging.getLogger(__name__)

V = sp.Symbol('v')


# ---------------------------------------------------------------------------
# Truncated polynomial matrices
# ---------------------------------------------------------------------------

def v_terms(expr) -> Dict[int, sp.Expr]:
    """{degree in v: coefficient}; negative degrees are kept"""
    return {k[0]: c for k, c in laurent_terms(expr, [V]).items()}


def v_degree(expr) -> int:
    """Largest power of v, -1 for zero"""
    terms = v_terms(expr)
    return max(terms) if terms else -1


def truncate(expr, N: int) -> sp.Expr:
    return sp.Add(*[c * V ** k for k, c in v_terms(expr).items() if k < N])


def mat_truncate(M: sp.Matrix, N: int) -> sp.Matrix:
    return M.applyfunc(lambda x: truncate(x, N))


def mod_v(M: sp.Matrix) -> sp.Matrix:
    return M.applyfunc(lambda x: v_terms(x).get(0, sp.Integer(0)))


def mat_degree(M: sp.Matrix) -> int:
    return max(v_degree(x) for x in M)


def has_negative_powers(M: sp.Matrix) -> bool:
    return any(min(v_terms(x), default=0) < 0 for x in M)


def ad(w: Perm, X: sp.Matrix) -> sp.Matrix:
    """Ad(w)(X) = P_w X P_w^{-1}"""
    P = permutation_matrix(w)
    return P * X * P.T


def ad_torus(nu: Sequence[int], X: sp.Matrix) -> sp.Matrix:
    """Ad(v^nu)(X): entry (a, b) times v^{nu_a - nu_b}"""
    n = X.rows
    return sp.Matrix(n, n, lambda a, b: sp.expand(X[a, b] * V ** (nu[a] - nu[b])))


def phi(X: sp.Matrix, p: int) -> sp.Matrix:
    """v -> v^p, trivial on coefficients"""
    return X.applyfunc(lambda x: sp.expand(x.subs(V, V ** p)))


def truncated_inverse(P: sp.Matrix, N: int) -> sp.Matrix:
    """P^{-1} modulo v^N, via P = (1 + E) P0 with E divisible by v"""
    P0 = mod_v(P)
    if P0.det() == 0:
        raise NotInParabolic("gauge matrix is not invertible modulo v")
    P0_inv = P0.inv()
    E = mat_truncate((P - P0) * P0_inv, N)
    total = sp.eye(P.rows)
    term = sp.eye(P.rows)
    for _ in range(1, N):
        term = mat_truncate(-term * E, N)
        if term.is_zero_matrix:
            break
        total += term
    return mat_truncate(P0_inv * total, N)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

def default_trunc(hodge_bound: Weight, e: int, f: int) -> int:
    """4 e (h + 1) f with h the largest Hodge-bound entry"""
    h = max(max(comp) for comp in hodge_bound.entries)
    return 4 * e * (h + 1) * f


def sorted_values(t: TameInertialType, orientation: Sequence[Perm], j: int) -> Tuple[int, ...]:
    """a'^{(j)} read in the sorted coordinates of s_or,j (weakly decreasing)"""
    values = t.twisted_exponents(j)
    return tuple(values[orientation[j][k]] for k in range(t.n))


def in_parabolic(A0: sp.Matrix, values: Sequence[int]) -> bool:
    n = len(values)
    return all(
        A0[k, l] == 0
        for k in range(n) for l in range(n) if values[k] < values[l]
    )


def levi_part(A0: sp.Matrix, values: Sequence[int]) -> sp.Matrix:
    n = len(values)
    return sp.Matrix(n, n, lambda k, l: A0[k, l] if values[k] == values[l] else 0)


@dataclass(frozen=True)
class FrobFamily:
    """
    Partial Frobenius matrices A^{(0)}, ..., A^{(f-1)} of a tame type.

    Args:
        tame_type: the type whose orientation fixes the coordinates
        hodge_bound: lambda + eta, one component per embedding j~ (e*f of them)
        matrices: A^{(j)} as sympy matrices in v
        trunc: every entry has v-degree < trunc
        orientation: (s_or,0, ..., s_or,f-1); defaults to the type's own
    """
    tame_type: TameInertialType
    hodge_bound: Weight
    matrices: Tuple[sp.ImmutableMatrix, ...]
    trunc: int
    orientation: Tuple[Perm, ...] = field(default=())

    def __post_init__(self):
        t = self.tame_type
        base = self.orientation or t.orientation[:t.f]
        object.__setattr__(self, 'orientation', tuple(tuple(w) for w in base))
        mats = tuple(sp.ImmutableMatrix(sp.Matrix(A).applyfunc(sp.expand)) for A in self.matrices)
        object.__setattr__(self, 'matrices', mats)

        if len(mats) != t.f:
            raise DimensionMismatch(f"{len(mats)} matrices for a type with f={t.f}")
        if self.hodge_bound.n != t.n or self.hodge_bound.f != t.e * t.f:
            raise DimensionMismatch(
                f"Hodge bound of shape ({self.hodge_bound.n}, {self.hodge_bound.f}), "
                f"expected ({t.n}, {t.e * t.f})")
        if self.orientation not in valid_orientations(t):
            raise InvalidPermutation(f"{self.orientation} is not an orientation of a'={t.a_prime}")
        for j, A in enumerate(mats):
            if A.shape != (t.n, t.n):
                raise DimensionMismatch(f"A^({j}) has shape {A.shape}, expected {(t.n, t.n)}")
            if has_negative_powers(sp.Matrix(A)):
                raise NotInParabolic(f"A^({j}) has negative powers of v")
            if mat_degree(sp.Matrix(A)) >= self.trunc:
                raise TruncationOverflow(f"A^({j}) has v-degree {mat_degree(sp.Matrix(A))} >= {self.trunc}")
            A0 = mod_v(sp.Matrix(A))
            if not in_parabolic(A0, self.values(j)):
                raise NotInParabolic(f"A^({j}) mod v is not block upper triangular for the orientation")
            if A0.det() == 0:
                raise NotInParabolic(f"A^({j}) is not invertible modulo v")

    @property
    def context(self) -> ScalarContext:
        t = self.tame_type
        return ScalarContext(t.p, t.e, t.f)

    @property
    def n(self) -> int:
        return self.tame_type.n

    def values(self, j: int) -> Tuple[int, ...]:
        return sorted_values(self.tame_type, self.orientation, j)

    def full_orientation(self) -> Tuple[Perm, ...]:
        return extend_orientation(self.tame_type, self.orientation)


@dataclass(frozen=True)
class WDDatum:
    """det phi_I(Frob) per s_tau-orbit (0-based orbit index)"""
    tame_type: TameInertialType
    det_frob: Dict[int, SymbolicScalar]

    def __post_init__(self):
        t = self.tame_type
        ctx = ScalarContext(t.p, t.e, t.f)
        clean = {}
        for k in range(len(t.orbits)):
            if k not in self.det_frob:
                raise IndexOutOfRange(f"no determinant for orbit {k + 1}")
            value = self.det_frob[k]
            value = value if isinstance(value, SymbolicScalar) else SymbolicScalar(value, ctx)
            if value.is_zero():
                raise DimensionMismatch(f"det phi_{k + 1}(Frob) must be invertible, got 0")
            clean[k] = value
        object.__setattr__(self, 'det_frob', clean)


def from_c(t: TameInertialType, c_matrices: Sequence[sp.Matrix], hodge_bound: Optional[Weight] = None,
           trunc: Optional[int] = None, orientation: Optional[Sequence[Perm]] = None) -> FrobFamily:
    """A^{(j)} = Ad(s_or,j^{-1})(C^{(j)})"""
    base = tuple(orientation) if orientation else tuple(t.orientation[:t.f])
    bound = hodge_bound or eta(t.n, t.e * t.f)
    N = trunc or default_trunc(bound, t.e, t.f)
    mats = tuple(ad(inverse(base[j]), sp.Matrix(C)) for j, C in enumerate(c_matrices))
    return FrobFamily(t, bound, mats, N, base)


def to_c(fam: FrobFamily) -> Tuple[sp.Matrix, ...]:
    return tuple(ad(fam.orientation[j], sp.Matrix(A)) for j, A in enumerate(fam.matrices))


def from_c_diagonal(t: TameInertialType, diagonals: Sequence[Sequence], hodge_bound: Optional[Weight] = None,
                    trunc: Optional[int] = None, orientation: Optional[Sequence[Perm]] = None) -> FrobFamily:
    """Diagonal C^{(j)} = diag(diagonals[j])"""
    if len(diagonals) != t.f:
        raise DimensionMismatch(f"{len(diagonals)} diagonals for a type with f={t.f}")
    cs = []
    for j, diag in enumerate(diagonals):
        if len(diag) != t.n:
            raise DimensionMismatch(f"diagonal {j} has {len(diag)} entries, expected {t.n}")
        cs.append(sp.diag(*[sp.sympify(x) for x in diag]))
    return from_c(t, cs, hodge_bound, trunc, orientation)


def retarget(fam: FrobFamily, orientation: Sequence[Perm]) -> FrobFamily:
    """The same C-data presented under another valid orientation"""
    return from_c(fam.tame_type, to_c(fam), fam.hodge_bound, fam.trunc, orientation)


def lift_family(t: TameInertialType, t_tilde: Optional[Sequence] = None) -> FrobFamily:
    """Crystalline lift data of a principal series type: C-bar^{(0)} = diag(q^{i-1} tt_i), C^{(j)} = 1 otherwise"""
    if not t.is_principal_series():
        raise InvalidPermutation("lift data needs a principal series type (s_tau = 1)")
    values = list(t_tilde) if t_tilde is not None else [frob_var(i + 1, lift=True) for i in range(t.n)]
    diagonals = [[Q ** i * sp.sympify(values[i]) for i in range(t.n)]]
    diagonals += [[1] * t.n for _ in range(t.f - 1)]
    return from_c_diagonal(t, diagonals)


def block_scalar_family(t: TameInertialType, units, seed: Optional[int] = None) -> FrobFamily:
    """
    Diagonal family whose Frobenius power on orbit I is the scalar u_I.

    Each u_I sits at one index of its orbit in one C^{(j)}; every other entry
    is 1. With a seed the carrying index and embedding are chosen at random.
    """
    values = dict(units) if isinstance(units, Mapping) else dict(enumerate(units))
    rng = random.Random(seed) if seed is not None else None
    diagonals = [[sp.Integer(1)] * t.n for _ in range(t.f)]
    for k, orbit in enumerate(t.orbits):
        if k not in values:
            raise IndexOutOfRange(f"no unit for orbit {k + 1}")
        j = rng.randrange(t.f) if rng else 0
        i = rng.choice(orbit) if rng else orbit[0]
        diagonals[j][i] = sp.sympify(values[k])
    return from_c_diagonal(t, diagonals)


def construct_bounded(t: TameInertialType, lam: Optional[Weight] = None, seed: int = 0,
                      trunc: Optional[int] = None, orientation: Optional[Sequence[Perm]] = None) -> FrobFamily:
    """
    A^{(j)} = U_1 diag((v - pi)^{w(lambda_j + eta)}) U_2 with U_1, U_2 unimodular
    on the Levi blocks mod v and arbitrary in degree 1.

    lambda has e*f components; embedding j~ lies over j = j~ // e and the
    exponents of the e embeddings over j are added.
    """
    rng = random.Random(seed)
    lam = lam or Weight.zero(t.n, t.e * t.f)
    bound = lam + eta(t.n, t.e * t.f)
    if any(x < 0 for comp in bound.entries for x in comp):
        raise DimensionMismatch(f"lambda + eta must be non-negative, got {bound.to_list()}")
    base = tuple(orientation) if orientation else tuple(t.orientation[:t.f])
    N = trunc or default_trunc(bound, t.e, t.f)

    mats = []
    for j in range(t.f):
        exps = [sum(bound.entries[j * t.e + i][k] for i in range(t.e)) for k in range(t.n)]
        w = list(range(t.n))
        rng.shuffle(w)
        D = sp.diag(*[(V - PI) ** x for x in act(tuple(w), exps)])
        values = sorted_values(t, base, j)
        U1 = _levi_unimodular(values, rng) + V * _random_int_matrix(t.n, rng)
        U2 = _levi_unimodular(values, rng) + V * _random_int_matrix(t.n, rng)
        mats.append((U1 * D * U2).applyfunc(sp.expand))
    logger.debug(f"construct_bounded seed={seed} lambda={lam.to_list()}")
    return FrobFamily(t, bound, tuple(mats), N, base)


def _random_int_matrix(n: int, rng: random.Random, low: int = -2, high: int = 2) -> sp.Matrix:
    return sp.Matrix(n, n, lambda a, b: rng.randint(low, high))


def _levi_unimodular(values: Sequence[int], rng: random.Random) -> sp.Matrix:
    """Block diagonal (blocks of equal values) with determinant 1"""
    n = len(values)
    L = sp.Matrix(n, n, lambda a, b: 1 if a == b else (rng.randint(-2, 2) if a > b and values[a] == values[b] else 0))
    U = sp.Matrix(n, n, lambda a, b: 1 if a == b else (rng.randint(-2, 2) if a < b and values[a] == values[b] else 0))
    return L * U


def _parabolic_unimodular(values: Sequence[int], rng: random.Random) -> sp.Matrix:
    """Block upper triangular with determinant 1"""
    n = len(values)
    L = sp.Matrix(n, n, lambda a, b: 1 if a == b else (rng.randint(-2, 2) if a > b and values[a] == values[b] else 0))
    U = sp.Matrix(n, n, lambda a, b: 1 if a == b else (rng.randint(-2, 2) if a < b else 0))
    return L * U


def random_gauge(fam: FrobFamily, seed: int, degree: int = 2) -> Dict[int, sp.Matrix]:
    """P^{(j)} in the parabolic loop group: unimodular block upper mod v, random in higher degree"""
    rng = random.Random(seed)
    out = {}
    for j in range(fam.tame_type.f):
        P = _parabolic_unimodular(fam.values(j), rng)
        for k in range(1, degree + 1):
            P += V ** k * _random_int_matrix(fam.n, rng)
        out[j] = P
    return out


# ---------------------------------------------------------------------------
# Frobenius product and global functions
# ---------------------------------------------------------------------------

def frob_product(fam: FrobFamily) -> sp.ImmutableMatrix:
    """prod_{j=f-1}^{0} Ad(s_or,j)(A^{(j)}), full in v"""
    B = sp.eye(fam.n)
    for j in reversed(range(fam.tame_type.f)):
        B = (B * ad(fam.orientation[j], sp.Matrix(fam.matrices[j]))).applyfunc(sp.expand)
    degree = mat_degree(B)
    if degree >= fam.trunc:
        raise TruncationOverflow(f"Frobenius product has v-degree {degree} >= {fam.trunc}")
    return sp.ImmutableMatrix(B)


def levi_product(fam: FrobFamily) -> sp.Matrix:
    """The same product of the Levi parts of A^{(j)} mod v; block diagonal on index classes"""
    B = sp.eye(fam.n)
    for j in reversed(range(fam.tame_type.f)):
        A0 = levi_part(mod_v(sp.Matrix(fam.matrices[j])), fam.values(j))
        B = (B * ad(fam.orientation[j], A0)).applyfunc(sp.expand)
    return B


def frobenius_matrix(fam: FrobFamily) -> sp.Matrix:
    """F = P_{s_tau}^{-1} B: sends the span of a class c to that of s_tau^{-1}(c)"""
    return (permutation_matrix(fam.tame_type.s_tau).T * levi_product(fam)).applyfunc(sp.expand)


def index_class(t: TameInertialType, c: int) -> List[int]:
    """Indices sharing the exponent of the first index of the first orbit of class c"""
    i0 = t.orbits[t.classes[c][0]][0]
    return [i for i in range(t.n) if t.a_prime[i] == t.a_prime[i0]]


def _principal_minor_sum(M: sp.Matrix, d: int) -> sp.Expr:
    """e_d of the eigenvalues: (-1)^d times the X^{r-d} coefficient of the characteristic polynomial"""
    total = sp.Integer(0)
    for rows in itertools.combinations(range(M.rows), d):
        total += M.extract(list(rows), list(rows)).det(method='berkowitz')
    return sp.expand(total)


def f_function(fam: FrobFamily, Ibar: int, d: int) -> SymbolicScalar:
    t = fam.tame_type
    if not (0 <= Ibar < len(t.classes)):
        raise IndexOutOfRange(f"class index {Ibar} out of range")
    r = t.class_size(Ibar)
    if not (1 <= d <= r):
        raise DegreeOutOfRange(f"d={d} for a class of {r} orbits")
    power = frobenius_matrix(fam) ** t.orbit_size_of_class(Ibar)
    idx = index_class(t, Ibar)
    block = power.extract(idx, idx).applyfunc(sp.expand)
    return SymbolicScalar(_principal_minor_sum(block, d), fam.context)


def _degrees(t: TameInertialType, Ibar_set: Iterable[int], d) -> Dict[int, int]:
    classes = list(Ibar_set)
    degrees = {c: d[c] for c in classes} if isinstance(d, Mapping) else dict(zip(classes, d))
    if len(degrees) != len(classes):
        raise DegreeOutOfRange(f"need one degree per class, got {d}")
    for c, deg in degrees.items():
        if not (0 <= c < len(t.classes)):
            raise IndexOutOfRange(f"class index {c} out of range")
        if not (1 <= deg <= t.class_size(c)):
            raise DegreeOutOfRange(f"d={deg} for a class of {t.class_size(c)} orbits")
    return degrees


def total_degree(t: TameInertialType, degrees: Mapping[int, int]) -> int:
    """sum of d_Ibar * n_Ibar"""
    return sum(deg * t.orbit_size_of_class(c) for c, deg in degrees.items())


def _last_sum(lam: Optional[Weight], k: int) -> int:
    if lam is None or k == 0:
        return 0
    return sum(sum(comp[-k:]) for comp in lam.entries)


def divisibility_threshold(t: TameInertialType, Ibar_set: Iterable[int], d, lam: Optional[Weight]) -> int:
    """n_lambda(Ibar, d) = sum_j~ sum_{k < d_tot} (lambda_{j~, n-k} + k)"""
    U = total_degree(t, _degrees(t, Ibar_set, d))
    return _last_sum(lam, U) + t.e * t.f * U * (U - 1) // 2


def F_product(fam: FrobFamily, Ibar_set: Iterable[int], d) -> SymbolicScalar:
    """F_{Ibar,(d)} = prod f_{Ibar,d_Ibar}"""
    degrees = _degrees(fam.tame_type, Ibar_set, d)
    value = SymbolicScalar.one(fam.context)
    for c, deg in degrees.items():
        value = value * f_function(fam, c, deg)
    return value


def F_tilde(fam: FrobFamily, Ibar_set: Iterable[int], d, lam: Optional[Weight] = None) -> SymbolicScalar:
    """pi^{-sum <lambda_j~, w_0 omega_U>} q^{-U(U-1)/2} F_{Ibar,(d)}, U = sum d_Ibar n_Ibar"""
    t = fam.tame_type
    ids = list(Ibar_set)
    U = total_degree(t, _degrees(t, ids, d))
    norm = SymbolicScalar(PI ** -_last_sum(lam, U) * Q ** (-U * (U - 1) // 2), fam.context)
    return F_product(fam, ids, d) * norm


def divisibility_check(fam: FrobFamily, Ibar_set: Iterable[int], d, lam: Optional[Weight] = None) -> bool:
    """valuation(F_{Ibar,(d)}) >= n_lambda(Ibar, d)"""
    ids = list(Ibar_set)
    value = F_product(fam, ids, d)
    threshold = divisibility_threshold(fam.tame_type, ids, d, lam)
    ok = value.valuation() >= threshold
    if not ok:
        logger.debug(f"divisibility fails: v={value.valuation()} < {threshold} for classes {ids}")
    return ok


def function_table(fam: FrobFamily, lam: Optional[Weight] = None) -> List[Dict]:
    """Every f_{Ibar,d} and the single-class F~ with their valuations"""
    t = fam.tame_type
    rows = []
    for c in range(len(t.classes)):
        for deg in range(1, t.class_size(c) + 1):
            value = f_function(fam, c, deg)
            normalized = F_tilde(fam, [c], [deg], lam)
            rows.append({
                'class': c + 1,
                'd': deg,
                'f': value.to_text(),
                'F_tilde': normalized.to_text(),
                'valuation': str(normalized.valuation()),
            })
    return rows


# ---------------------------------------------------------------------------
# Change of eigenbasis
# ---------------------------------------------------------------------------

def change_eigenbasis(fam: FrobFamily, P: Mapping[int, sp.Matrix],
                      presentation: Optional[Presentation] = None) -> FrobFamily:
    """
    A'^{(j)} = P^{(j)} A^{(j)} Ad(s_j^{-1} v^{mu_j + eta})(phi(P^{(j-1)})^{-1}), indices mod f.

    Raises:
        NotInParabolic: a P^{(j)} is not in the parabolic, or negative powers of v survive
    """
    t = fam.tame_type
    f, N, p = t.f, fam.trunc, t.p
    if presentation is None:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', NonRegularDigits)
            presentation = presentation_for_orientation(t, fam.orientation)
    pres = presentation
    e = eta(t.n).entries[0]

    gauges = {}
    for j in range(f):
        if j not in P:
            raise IndexOutOfRange(f"no gauge matrix for j={j}")
        Pj = sp.Matrix(P[j])
        if has_negative_powers(Pj) or not in_parabolic(mod_v(Pj), fam.values(j)):
            raise NotInParabolic(f"P^({j}) mod v is not in the parabolic of the orientation")
        gauges[j] = Pj

    inv_depth = N // p + 2
    phi_inv = {j: mat_truncate(phi(truncated_inverse(Pj, inv_depth), p), N + p) for j, Pj in gauges.items()}

    new = []
    for j in range(f):
        shift = [a + b for a, b in zip(pres.mu.component(j), e)]
        X = ad(inverse(pres.s[j]), ad_torus(shift, phi_inv[(j - 1) % f]))
        A = (gauges[j] * sp.Matrix(fam.matrices[j]) * X).applyfunc(sp.expand)
        if has_negative_powers(A):
            raise NotInParabolic(f"A'^({j}) has negative powers of v")
        new.append(mat_truncate(A, N))
    return replace(fam, matrices=tuple(new))


# ---------------------------------------------------------------------------
# Weil-Deligne side
# ---------------------------------------------------------------------------

def wd_datum_of(fam: FrobFamily) -> WDDatum:
    """
    Read det phi_I(Frob) off a block-scalar family.

    Raises:
        NotBlockScalar: F^{#I} is not diagonal on the index class of I
    """
    t = fam.tame_type
    F = frobenius_matrix(fam)
    values = {}
    for k, orbit in enumerate(t.orbits):
        power = (F ** len(orbit)).applyfunc(sp.expand)
        i = orbit[0]
        members = [m for m in range(t.n) if t.a_prime[m] == t.a_prime[i]]
        for a in members:
            for b in members:
                if a != b and power[a, b] != 0:
                    raise NotBlockScalar(f"F^{len(orbit)} mixes indices {a + 1} and {b + 1}")
        values[k] = SymbolicScalar(power[i, i], fam.context)
    return WDDatum(t, values)


def reducibility_check(wd: WDDatum, lam: Optional[Weight], Ibar_set: Iterable[int], d) -> bool:
    """
    pi^{-sum <lambda, w_0 omega_U>} q^{-U(U-1)/2} prod sym_{d_Ibar}(det phi_I) is a unit.

    Raises:
        UnitAmbiguity: propagated from the residue computation
    """
    t = wd.tame_type
    degrees = _degrees(t, Ibar_set, d)
    U = total_degree(t, degrees)
    expr = PI ** -_last_sum(lam, U) * Q ** (-U * (U - 1) // 2)
    for c, deg in degrees.items():
        expr *= elementary_symmetric(deg, [wd.det_frob[k].expr for k in t.classes[c]])
    scalar = SymbolicScalar(expr, ScalarContext(t.p, t.e, t.f))
    if scalar.valuation() != 0:
        return False
    return not scalar.reduce_mod_varpi().is_zero()


@dataclass(frozen=True)
class ReducibilityData:
    m: int
    lam_prime: Weight
    tau_prime: TameInertialType
    orbits: Tuple[int, ...]


def reducibility_data(wd: WDDatum, lam: Optional[Weight], Ibar_set: Iterable[int], d) -> ReducibilityData:
    """
    Sub-representation data: m = sum d_Ibar n_Ibar, lambda' = last m entries of
    each lambda_j~, tau' built on the first d_Ibar orbits of every class.
    """
    t = wd.tame_type
    degrees = _degrees(t, Ibar_set, d)
    m = total_degree(t, degrees)
    lam = lam or Weight.zero(t.n, t.e * t.f)
    lam_prime = Weight(tuple(comp[t.n - m:] for comp in lam.entries))

    chosen = sorted(k for c, deg in degrees.items() for k in t.classes[c][:deg])
    indices = sorted(i for k in chosen for i in t.orbits[k])
    pos = {i: a for a, i in enumerate(indices)}
    s_sub = tuple(pos[t.s_tau[i]] for i in indices)
    sub_order = math.lcm(*[len(t.orbits[k]) for k in chosen])
    ratio = t.modulus // (t.p ** (t.f * sub_order) - 1)
    a_sub = [t.a_prime[i] // ratio for i in indices]
    tau_prime = build_type(t.p, t.e, t.f, m, a_sub, s_sub)
    return ReducibilityData(m=m, lam_prime=lam_prime, tau_prime=tau_prime, orbits=tuple(chosen))


# ---------------------------------------------------------------------------
# Parabolic factorization and the shape setup
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParabolicFactors:
    """A = P_w^{-1} diag(D_a, D_b) [[M_a, 0], [X, M_b]] P_w"""
    w: Perm
    blocks: Tuple[int, int]
    D_a: sp.ImmutableMatrix
    D_b: sp.ImmutableMatrix
    M_a: sp.ImmutableMatrix
    M_b: sp.ImmutableMatrix
    X: sp.ImmutableMatrix


def _constant_term(x) -> sp.Expr:
    c = v_terms(x).get(0, sp.Integer(0))
    return c if c != 0 else sp.Integer(1)


def parabolic_factorization(A: sp.Matrix, wM: Perm, blocks: Tuple[int, int]) -> ParabolicFactors:
    """
    Split A conjugated by w^M into a torus part and a block lower triangular part.

    D_d carries the constant terms of the diagonal entries, so the diagonal of
    M_d has constant term 1 wherever that term was nonzero.

    Raises:
        NotFactorizable: the conjugated matrix has a nonzero upper right block,
            or its leading block is singular mod v
    """
    a, b = blocks
    A = sp.Matrix(A)
    if A.shape != (a + b, a + b) or len(wM) != a + b:
        raise DimensionMismatch(f"blocks {blocks} do not match a {A.shape} matrix and w={wM}")
    P = permutation_matrix(wM)
    conj = (P * A * P.T).applyfunc(sp.expand)
    if any(conj[i, k] != 0 for i in range(a) for k in range(a, a + b)):
        raise NotFactorizable("conjugated matrix is not block lower triangular")
    lead = conj[:a, :a]
    if mod_v(lead).det() == 0:
        raise NotFactorizable("leading block is singular modulo v")
    if mod_v(conj[a:, a:]).det() == 0:
        raise NotFactorizable("trailing block is singular modulo v")

    D_a = sp.diag(*[_constant_term(conj[i, i]) for i in range(a)])
    D_b = sp.diag(*[_constant_term(conj[a + i, a + i]) for i in range(b)])
    M_a = (D_a.inv() * lead).applyfunc(sp.cancel)
    M_b = (D_b.inv() * conj[a:, a:]).applyfunc(sp.cancel)
    X = (D_b.inv() * conj[a:, :a]).applyfunc(sp.cancel)
    return ParabolicFactors(
        w=tuple(wM), blocks=(a, b),
        D_a=sp.ImmutableMatrix(D_a), D_b=sp.ImmutableMatrix(D_b),
        M_a=sp.ImmutableMatrix(M_a), M_b=sp.ImmutableMatrix(M_b), X=sp.ImmutableMatrix(X),
    )


def recompose(factors: ParabolicFactors) -> sp.Matrix:
    a, b = factors.blocks
    D = sp.diag(sp.Matrix(factors.D_a), sp.Matrix(factors.D_b))
    lower = sp.zeros(a + b, a + b)
    lower[:a, :a] = factors.M_a
    lower[a:, a:] = factors.M_b
    lower[a:, :a] = factors.X
    P = permutation_matrix(factors.w)
    return (P.T * D * lower * P).applyfunc(lambda x: sp.expand(sp.cancel(x)))


def random_parabolic_element(blocks: Tuple[int, int], rng: random.Random) -> sp.Matrix:
    """Block lower triangular, determinant 1, entries in Z[v]"""
    a, b = blocks
    n = a + b
    L = sp.Matrix(n, n, lambda r, c: 1 if r == c else (rng.randint(-2, 2) + rng.randint(-1, 1) * V if r > c else 0))
    U = sp.Matrix(n, n, lambda r, c: 1 if r == c else (rng.randint(-2, 2) if r < c and (r < a) == (c < a) else 0))
    return L * U


def conjugate_in_parabolic(A: sp.Matrix, wM: Perm, g: sp.Matrix) -> sp.Matrix:
    """P_w^{-1} g P_w A P_w^{-1} g^{-1} P_w"""
    P = permutation_matrix(wM)
    g_inv = sp.Matrix(g).inv().applyfunc(sp.cancel)
    return (P.T * g * P * sp.Matrix(A) * P.T * g_inv * P).applyfunc(sp.expand)


def shape_of(rho: Presentation, tau: Presentation) -> ExtAffWeylElt:
    """(t_{mu_tau} s_tau)^{-1} (t_{mu_rho} s_rho), componentwise"""
    w_tau = ExtAffWeylElt(tau.mu, tau.s)
    w_rho = ExtAffWeylElt(rho.mu, rho.s)
    return w_tau.inverse() * w_rho


def block_sum(x: ExtAffWeylElt, y: ExtAffWeylElt) -> ExtAffWeylElt:
    """(x, y) in the Levi GL_a x GL_b"""
    if x.f != y.f:
        raise DimensionMismatch("block components have different f")
    a = x.n
    nu = Weight(tuple(cx + cy for cx, cy in zip(x.translation.entries, y.translation.entries)))
    ws = tuple(tuple(wx) + tuple(a + i for i in wy) for wx, wy in zip(x.finite_part, y.finite_part))
    return ExtAffWeylElt(nu, ws)


def _block_presentation(x: Presentation, y: Presentation, shift_a: int = 0) -> Presentation:
    a = x.mu.n
    s = tuple(tuple(sx) + tuple(a + i for i in sy) for sx, sy in zip(x.s, y.s))
    mu = Weight(tuple(tuple(m - shift_a for m in cx) + tuple(cy) for cx, cy in zip(x.mu.entries, y.mu.entries)))
    return Presentation(s, mu)


def _restrict(w: Perm, start: int, size: int) -> Perm:
    return tuple(w[start + i] - start for i in range(size))


def _choose_alcove_element(mu: Weight, p: int) -> ExtAffWeylElt:
    """t_nu w with mu in t_nu w . C_0: nu = 0 and w sorting mu + eta when that works"""
    n = mu.n
    e = eta(n).entries[0]
    ws, nus = [], []
    for comp in mu.entries:
        shifted = [m + x for m, x in zip(comp, e)]
        order = sorted(range(n), key=lambda i: (-shifted[i], i))
        w = tuple(order)   # w^{-1}(shifted) is sorted descending
        if len(set(shifted)) == n and max(shifted) - min(shifted) < p:
            nu = (0,) * n
        else:
            target = act(w, e)
            nu = tuple(s - x for s, x in zip(shifted, target))
        ws.append(w)
        nus.append(nu)
    elt = ExtAffWeylElt(Weight(tuple(nus)), tuple(ws))
    if not is_in_C0(dot_action(elt.inverse(), mu), p):
        raise ShapeIdentityFailure(f"no alcove element found for mu={mu.to_list()}")
    return elt


@dataclass(frozen=True)
class ShapeSetup:
    p: int
    blocks: Tuple[int, int]
    tau: Presentation
    rho: Presentation
    w_tilde: ExtAffWeylElt
    w_M: Tuple[Perm, ...]
    w_upper_M: Tuple[Perm, ...]
    w_tilde_a: ExtAffWeylElt
    w_tilde_b: ExtAffWeylElt
    tau_twisted: Presentation
    rho_twisted: Presentation
    parts_twisted: Tuple[Tuple[Presentation, Presentation], Tuple[Presentation, Presentation]]
    shape: ExtAffWeylElt
    shape_a: ExtAffWeylElt
    shape_b: ExtAffWeylElt

    def to_dict(self) -> Dict:
        def elt(x: ExtAffWeylElt):
            return {'nu': x.translation.to_list(), 'w': [[i + 1 for i in w] for w in x.finite_part]}
        return {
            'blocks': list(self.blocks),
            'w_tilde': elt(self.w_tilde),
            'w_M': [[i + 1 for i in w] for w in self.w_M],
            'w^M': [[i + 1 for i in w] for w in self.w_upper_M],
            'shape': elt(self.shape),
            'shape_a': elt(self.shape_a),
            'shape_b': elt(self.shape_b),
        }


def shape_setup(rho_parts: Sequence[Tuple[Sequence[Perm], Weight]], tau_parts: Sequence[Presentation],
                p: int) -> ShapeSetup:
    """
    Presentations of rho = rho_a + rho_b and tau = tau_a + tau_b compatible with GL_a x GL_b.

    Args:
        rho_parts: (w'_d, nu'_d) for d = a, b, the shapes w'_d t_{nu'_d} of the parts
        tau_parts: lowest alcove presentations (s_d, mu_d) of tau_a, tau_b
        p: residue characteristic

    Raises:
        ShapeIdentityFailure: the twisted shape is not the w^M-conjugate of the block shapes
    """
    (w_a, nu_a), (w_b, nu_b) = rho_parts
    pres_a, pres_b = tau_parts
    a, b = pres_a.mu.n, pres_b.mu.n
    f = pres_a.mu.f
    under_b = Weight(tuple((b,) * a for _ in range(f)))

    def rho_part(pres: Presentation, w_prime, nu_prime: Weight, shift: Optional[Weight]) -> Presentation:
        s_rho = tuple(compose(s, w) for s, w in zip(pres.s, w_prime))
        mu_rho = pres.mu + act_weight(s_rho, nu_prime)
        if shift is not None:
            mu_rho = mu_rho + shift
        return Presentation(s_rho, mu_rho)

    rho_a = rho_part(pres_a, w_a, nu_a, under_b)
    rho_b = rho_part(pres_b, w_b, nu_b, None)
    tau = _block_presentation(pres_a, pres_b, shift_a=b)
    rho = _block_presentation(rho_a, rho_b, shift_a=b)

    w_tilde = _choose_alcove_element(tau.mu, p)
    tau_twisted = twist_presentation(w_tilde.inverse(), tau)
    rho_twisted = twist_presentation(w_tilde.inverse(), rho)

    w_M, w_upper = [], []
    for w in w_tilde.finite_part:
        lower, upper = levi_decompose(w, [a, b])
        w_M.append(lower)
        w_upper.append(upper)
    nu_parts_a = Weight(tuple(c[:a] for c in w_tilde.translation.entries))
    nu_parts_b = Weight(tuple(c[a:] for c in w_tilde.translation.entries))
    w_tilde_a = ExtAffWeylElt(nu_parts_a, tuple(_restrict(w, 0, a) for w in w_M))
    w_tilde_b = ExtAffWeylElt(nu_parts_b, tuple(_restrict(w, a, b) for w in w_M))

    parts = (
        (twist_presentation(w_tilde_a.inverse(), rho_a), twist_presentation(w_tilde_a.inverse(), pres_a)),
        (twist_presentation(w_tilde_b.inverse(), rho_b), twist_presentation(w_tilde_b.inverse(), pres_b)),
    )
    shape = shape_of(rho_twisted, tau_twisted)
    shape_a = shape_of(*parts[0])
    shape_b = shape_of(*parts[1])

    pi_wM = ExtAffWeylElt.finite(w_upper).rotate()
    expected = pi_wM.inverse() * block_sum(shape_a, shape_b) * pi_wM
    if shape != expected:
        raise ShapeIdentityFailure(
            f"shape {shape} differs from the w^M-conjugate of the block shapes {expected}")
    logger.debug(f"shape setup ok: w^M={w_upper}")
    return ShapeSetup(
        p=p, blocks=(a, b), tau=tau, rho=rho, w_tilde=w_tilde,
        w_M=tuple(w_M), w_upper_M=tuple(w_upper), w_tilde_a=w_tilde_a, w_tilde_b=w_tilde_b,
        tau_twisted=tau_twisted, rho_twisted=rho_twisted, parts_twisted=parts,
        shape=shape, shape_a=shape_a, shape_b=shape_b,
    )


# ---------------------------------------------------------------------------
# Config input
# ---------------------------------------------------------------------------

def family_from_spec(t: TameInertialType, spec: Mapping) -> FrobFamily:
    """
    Build a family from a [family] table.

    Keys: kind ('diagonal', 'bounded', 'lift', 'block-scalar'), diagonal
    (f lists of n scalar strings), lambda (e*f integer lists), units, seed, trunc.
    """
    kind = spec.get('kind', 'diagonal')
    lam = Weight(tuple(tuple(c) for c in spec['lambda'])) if 'lambda' in spec else None
    trunc = spec.get('trunc')
    if kind == 'bounded':
        return construct_bounded(t, lam, seed=int(spec.get('seed', 0)), trunc=trunc)
    if kind == 'lift':
        return lift_family(t, spec.get('t'))
    if kind == 'block-scalar':
        units = [sp.sympify(u, locals={'pi': PI, 'q': Q}) for u in spec['units']]
        return block_scalar_family(t, units, spec.get('seed'))
    if kind != 'diagonal':
        raise ConfigError(f"unknown family kind {kind!r}")
    if 'diagonal' not in spec:
        raise ConfigError("[family] of kind 'diagonal' needs a 'diagonal' field")
    diagonals = [[sp.sympify(str(x).replace('^', '**'), locals={'pi': PI, 'q': Q}) for x in row]
                 for row in spec['diagonal']]
    bound = lam + eta(t.n, t.e * t.f) if lam is not None else None
    return from_c_diagonal(t, diagonals, hodge_bound=bound, trunc=trunc)
