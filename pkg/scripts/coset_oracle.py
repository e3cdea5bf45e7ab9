"""
SatakeForge - Brute-force oracles

Literal coset enumeration for small GL_n(Q_p), the GL_2 mod p Satake sum,
principal series coinvariants over F_p, and the Cauchy-Binet minor expansion.
Everything here is independent of the structural formulas in hecke.py and is
used to cross-check them.

Lattices:
    A matrix g in GL_n(Q_p) is stored as (G, s) with g = p^{-s} G and G
    integral. Cosets are keyed by column Hermite normal forms of lattices
    computed modulo p^N.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import galois
import numpy as np
import sympy as sp

from errors import CosetCountMismatch, DepthTooSmall, DimensionMismatch, FieldTooLarge
from hecke import LevelData, conv_TT
from root_data import Weight
from scalars import Q

logger = logging.getLogger(__name__)

IWAHORI = 'iwahori'
MAXIMAL = 'maximal'
LEVELS = (IWAHORI, MAXIMAL)

Key = Tuple[Tuple[Tuple[int, ...], ...], ...]


# ---------------------------------------------------------------------------
# Hermite normal forms and elementary divisors
# ---------------------------------------------------------------------------

def _columns(M) -> List[List[int]]:
    arr = np.asarray(M, dtype=object)
    return [[int(arr[i, j]) for i in range(arr.shape[0])] for j in range(arr.shape[1])]


def hermite_normal_form(M, p: int, N: int) -> Tuple[Tuple[int, ...], ...]:
    """
    Column HNF of the lattice spanned by the columns of M plus p^N Z^n.

    Returns the upper triangular basis as a row-major tuple: positive p-power
    diagonal, entries right of the diagonal reduced modulo the diagonal entry
    of their row.
    """
    cols = _columns(M)
    n = len(cols[0])
    modulus = p ** N
    gens = [[x % modulus for x in c] for c in cols]
    gens += [[modulus if i == k else 0 for i in range(n)] for k in range(n)]

    basis: List[Optional[List[int]]] = [None] * n
    for row in reversed(range(n)):
        pivot, rest = None, []
        for g in gens:
            if g[row] == 0:
                rest.append(g)
                continue
            if pivot is None:
                pivot = g
                continue
            while g[row] != 0:
                factor = pivot[row] // g[row]
                pivot = [a - factor * b for a, b in zip(pivot, g)]
                pivot, g = g, pivot
            rest.append(g)
        if pivot[row] < 0:
            pivot = [-a for a in pivot]
        basis[row] = pivot
        gens = [[x % modulus for x in g] for g in rest if any(g)]

    for row in reversed(range(n)):
        d = basis[row][row]
        for k in range(row + 1, n):
            factor = basis[k][row] // d
            if factor:
                basis[k] = [a - factor * b for a, b in zip(basis[k], basis[row])]
    return tuple(tuple(basis[k][i] for k in range(n)) for i in range(n))


def _p_valuation(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of 0")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def elementary_divisor_exponents(M, p: int) -> Tuple[int, ...]:
    """p-adic elementary divisor exponents of an integral nonsingular matrix (ascending)"""
    mat = sp.Matrix(M)
    n = mat.rows
    partial = [0]
    for k in range(1, n + 1):
        g = 0
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                g = sp.gcd(g, mat.extract(list(rows), list(cols)).det())
        if g == 0:
            raise DimensionMismatch("matrix is singular")
        partial.append(_p_valuation(int(g), p))
    return tuple(partial[k] - partial[k - 1] for k in range(1, n + 1))


# ---------------------------------------------------------------------------
# Cosets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CosetRep:
    """g = p^{-scale} matrix, representing g Iw or g K"""
    matrix: Tuple[Tuple[int, ...], ...]
    scale: int
    level: str
    key: Key

    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=object)


def _chain_bases(n: int, p: int, level: str) -> List[np.ndarray]:
    if level == MAXIMAL:
        return [np.identity(n, dtype=object)]
    return [np.diag([1] * (n - k) + [p] * k).astype(object) for k in range(n)]


def coset_key(G, p: int, N: int, level: str) -> Key:
    """Key of the coset G * (Iw or K) for an integral matrix G"""
    G = np.asarray(G, dtype=object)
    return tuple(hermite_normal_form(G.dot(B), p, N) for B in _chain_bases(G.shape[0], p, level))


def _translation(mu: Sequence[int], p: int, scale: int) -> np.ndarray:
    return np.diag([p ** (m + scale) for m in mu]).astype(object)


def _scale_of(mu: Sequence[int]) -> int:
    return max(0, -min(mu))


def _spread(mus: Sequence[Sequence[int]]) -> int:
    return sum(_scale_of(m) + max(0, max(m)) for m in mus) + 1


def default_depth(*mus: Sequence[int]) -> int:
    return 2 * (1 + _spread(mus))


def _check_depth(N: int, mus: Sequence[Sequence[int]]):
    spread = _spread(mus)
    if N <= spread:
        raise DepthTooSmall(f"depth N={N} must exceed the valuation spread {spread}")


def _as_vector(mu) -> Tuple[int, ...]:
    if isinstance(mu, Weight):
        return mu.entries[0]
    return tuple(int(x) for x in mu)


def _iwahori_candidates(mu: Sequence[int], p: int, scale: int):
    n = len(mu)
    upper = [(i, k) for i in range(n) for k in range(i + 1, n)]
    lower = [(i, k) for i in range(n) for k in range(i)]
    ranges_u = [range(p ** max(0, mu[i] - mu[k])) for i, k in upper]
    ranges_l = [range(p ** max(0, mu[i] - mu[k])) for i, k in lower]
    t = _translation(mu, p, scale)
    for vals_l in itertools.product(*ranges_l):
        ul = np.identity(n, dtype=object)
        for (i, k), x in zip(lower, vals_l):
            ul[i, k] = p * x
        for vals_u in itertools.product(*ranges_u):
            uu = np.identity(n, dtype=object)
            for (i, k), x in zip(upper, vals_u):
                uu[i, k] = x
            yield ul.dot(uu).dot(t)


def _maximal_candidates(mu: Sequence[int], p: int, scale: int):
    n = len(mu)
    target = tuple(sorted(m + scale for m in mu))
    top = max(target)
    for diag in itertools.product(range(top + 1), repeat=n):
        if sum(diag) != sum(target):
            continue
        slots = [(i, k) for i in range(n) for k in range(i + 1, n)]
        for vals in itertools.product(*[range(p ** diag[i]) for i, _ in slots]):
            H = np.diag([p ** d for d in diag]).astype(object)
            for (i, k), x in zip(slots, vals):
                H[i, k] = x
            if elementary_divisor_exponents(H.tolist(), p) == target:
                yield H


def enumerate_cosets(n: int, p: int, level: str, mu, depth: Optional[int] = None) -> List[CosetRep]:
    """
    Right coset representatives of (level) mu(p) (level) / (level).

    Args:
        level: 'iwahori' or 'maximal'
        mu: cocharacter as an n-vector
        depth: N, lattices are computed modulo p^N
    """
    mu = _as_vector(mu)
    if len(mu) != n:
        raise DimensionMismatch(f"mu={mu} has the wrong length for n={n}")
    if level not in LEVELS:
        raise ValueError(f"Unknown level {level!r}; expected one of {LEVELS}")
    N = depth if depth is not None else default_depth(mu)
    _check_depth(N, [mu])
    scale = _scale_of(mu)

    candidates = _iwahori_candidates(mu, p, scale) if level == IWAHORI else _maximal_candidates(mu, p, scale)
    reps: Dict[Key, CosetRep] = {}
    for G in candidates:
        key = coset_key(G, p, N, level)
        if key not in reps:
            reps[key] = CosetRep(tuple(tuple(int(x) for x in row) for row in G.tolist()), scale, level, key)

    if level == IWAHORI:
        expected = p ** sum(abs(mu[i] - mu[k]) for i, k in itertools.combinations(range(n), 2))
        if len(reps) != expected:
            raise CosetCountMismatch(f"Iwahori coset count {len(reps)} != expected {expected} for mu={mu}, N={N}")
    logger.debug(f"{len(reps)} {level} cosets for mu={mu}, p={p}, N={N}")
    return list(reps.values())


def _translation_target(G: np.ndarray, scale: int, p: int, N: int, level: str, key: Key) -> Optional[Tuple[int, ...]]:
    """nu with t_nu (level) = G (level), or None"""
    H = key[0]
    n = len(H)
    if any(H[i][k] for i in range(n) for k in range(n) if i != k):
        return None
    nu = tuple(_p_valuation(H[i][i], p) - scale for i in range(n))
    if level == MAXIMAL:
        # only antidominant translations stand for their double coset
        nu = tuple(sorted(nu))
    if coset_key(_translation(nu, p, scale), p, N, level) != key:
        return None
    return nu


def convolve_oracle(n: int, p: int, level: str, mu1, mu2, depth: Optional[int] = None) -> Dict[Weight, int]:
    """
    Structure constants of [level mu1 level] * [level mu2 level] at translations.

    c(nu) = #{(x, y) : x y (level) = t_nu (level)} over coset representatives x of
    the first and y of the second double coset. Mass landing on non-translation
    cosets (Iwahori level) is logged and not reported.
    """
    a, b = _as_vector(mu1), _as_vector(mu2)
    N = depth if depth is not None else default_depth(a, b)
    _check_depth(N, [a, b])
    xs = enumerate_cosets(n, p, level, a, N)
    ys = enumerate_cosets(n, p, level, b, N)
    scale = xs[0].scale + ys[0].scale

    counts: Counter = Counter()
    other = 0
    for x in xs:
        for y in ys:
            G = x.array().dot(y.array())
            key = coset_key(G, p, N, level)
            nu = _translation_target(G, scale, p, N, level, key)
            if nu is None:
                other += 1
            else:
                counts[nu] += 1
    if other:
        logger.debug(f"{other} products of {a} * {b} land on non-translation cosets")
    return {Weight((nu,)): c for nu, c in sorted(counts.items())}


def conv_formula_table(n: int, p: int, pairs: Sequence[Tuple[Sequence[int], Sequence[int]]],
                       depth: Optional[int] = None) -> List[Dict]:
    """Oracle counts next to the structural q-power (q = p), Iwahori level, M = T"""
    level = LevelData.principal_series(p, n)
    rows = []
    for mu1, mu2 in pairs:
        scalar, total = conv_TT(mu1, mu2, level)
        predicted = sp.sympify(scalar.expr.subs(Q, p))
        counts = convolve_oracle(n, p, IWAHORI, mu1, mu2, depth)
        observed = counts.get(total, 0)
        rows.append({
            'mu1': str(list(mu1)), 'mu2': str(list(mu2)), 'target': str(list(total.entries[0])),
            'formula': int(predicted) if predicted.is_Integer else str(predicted), 'oracle': observed,
            'support': len(counts), 'match': observed == predicted and len(counts) == 1,
        })
    return rows


# ---------------------------------------------------------------------------
# GL_2 mod p Satake sum
# ---------------------------------------------------------------------------

_X, _Y = sp.symbols('X Y')


def _mod_p(x: Fraction, p: int) -> int:
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not p-integral")
    return (x.numerator * pow(x.denominator, -1, p)) % p


def _frac_valuation(x: Fraction, p: int) -> float:
    if x == 0:
        return float('inf')
    return _p_valuation(abs(x.numerator), p) - _p_valuation(x.denominator, p)


def cartan_decomposition_gl2(g: Sequence[Sequence[Fraction]], p: int):
    """
    g = k1 * diag(p^l1, p^l2) * k2 with l1 <= l2 and k1, k2 in GL_2(Z_p).

    Returns (k1, (l1, l2), k2) with k1, k2 as 2x2 lists of Fractions.
    """
    g = [[Fraction(x) for x in row] for row in g]
    entries = [(i, k) for i in range(2) for k in range(2)]
    i0, k0 = min(entries, key=lambda ik: _frac_valuation(g[ik[0]][ik[1]], p))
    swap_rows = [[0, 1], [1, 0]] if i0 == 1 else [[1, 0], [0, 1]]
    swap_cols = [[0, 1], [1, 0]] if k0 == 1 else [[1, 0], [0, 1]]
    h = _mat_mul(_mat_mul(swap_rows, g), swap_cols)
    a, b, c, d = h[0][0], h[0][1], h[1][0], h[1][1]
    d2 = d - c * b / a
    l1, l2 = int(_frac_valuation(a, p)), int(_frac_valuation(d2, p))
    units = [[a / Fraction(p) ** l1, 0], [0, d2 / Fraction(p) ** l2]]
    k1 = _mat_mul(swap_rows, [[1, 0], [c / a, 1]])
    k2 = _mat_mul(_mat_mul(units, [[1, b / a], [0, 1]]), swap_cols)
    return k1, (l1, l2), k2


def _mat_mul(A, B):
    return [[sum(Fraction(A[i][l]) * Fraction(B[l][k]) for l in range(2)) for k in range(2)] for i in range(2)]


def _act_sym(k, P: sp.Expr, p: int, m: int) -> sp.Expr:
    """(k.P)(X, Y) = P((X, Y) k) det(k)^m over F_p"""
    a, b = _mod_p(Fraction(k[0][0]), p), _mod_p(Fraction(k[0][1]), p)
    c, d = _mod_p(Fraction(k[1][0]), p), _mod_p(Fraction(k[1][1]), p)
    det = (a * d - b * c) % p
    moved = P.subs({_X: a * _X + c * _Y, _Y: b * _X + d * _Y}, simultaneous=True)
    poly = sp.Poly(sp.expand(moved * pow(det, m, p)), _X, _Y, modulus=p)
    return poly.as_expr()


def _x_r_coefficient(P: sp.Expr, r: int, p: int) -> int:
    if P == 0:
        return 0
    return int(sp.Poly(P, _X, _Y).coeff_monomial(_X ** r)) % p


def _hecke_value_on_highest(g, mu: Tuple[int, int], p: int, r: int, m: int) -> int:
    """X^r-coefficient of T_mu(g) applied to X^r, T_mu(k1 mu(p) k2) = k1 Phi k2"""
    k1, lam, k2 = cartan_decomposition_gl2(g, p)
    if lam != mu:
        return 0
    v = _act_sym(k2, _X ** r, p, m)
    v = _x_r_coefficient(v, r, p) * _X ** r
    v = _act_sym(k1, v, p, m)
    return _x_r_coefficient(v, r, p)


def satake_oracle_gl2(p: int, r: int, m: int, mu) -> sp.Expr:
    """
    S(T-bar_mu) for sigma = Sym^r (x) det^m of GL_2(F_p), as a Laurent polynomial in x1, x2.

    mu must be antidominant. The value at t = nu(p) is the X^r-coefficient of
    sum_{u in U(Q_p)/U(Z_p)} T_mu(t u) X^r; nu contributes the monomial x^{-nu}.
    """
    mu = _as_vector(mu)
    if len(mu) != 2 or mu[0] > mu[1]:
        raise DimensionMismatch(f"mu={mu} must be an antidominant GL_2 cocharacter")
    if not (0 <= r <= p - 1):
        raise ValueError(f"r={r} must lie in [0, {p - 1}]")
    x1, x2 = sp.symbols('x1 x2')
    total = mu[0] + mu[1]
    width = mu[1] - mu[0]
    out = sp.Integer(0)
    for nu1 in range(mu[0], mu[1] + 1):
        nu = (nu1, total - nu1)
        depth = abs(nu[0] - nu[1]) + width + 1
        value = 0
        for x in range(p ** depth):
            u = Fraction(x, p ** depth)
            g = [[Fraction(p) ** nu[0], Fraction(p) ** nu[0] * u], [0, Fraction(p) ** nu[1]]]
            value += _hecke_value_on_highest(g, mu, p, r, m)
        value %= p
        if value:
            out += value * x1 ** (-nu[0]) * x2 ** (-nu[1])
    logger.debug(f"S(T_{mu}) for Sym^{r} det^{m}, p={p}: {out}")
    return sp.expand(out)


def in_y_span(poly, n: int = 2) -> bool:
    """Every monomial x^a has a_1 >= a_2 >= ... (i.e. is a monomial in y_i = x_1...x_i)"""
    xs = [sp.Symbol(f"x{i + 1}") for i in range(n)]
    for term in sp.Add.make_args(sp.expand(poly)):
        if term == 0:
            continue
        powers = term.as_powers_dict()
        a = [int(powers.get(x, 0)) for x in xs]
        if any(a[i] < a[i + 1] for i in range(n - 1)):
            return False
    return True


# ---------------------------------------------------------------------------
# Principal series coinvariants over F_q
# ---------------------------------------------------------------------------

MAX_FIELD_SIZE = 4


def _bruhat_key(g, GF) -> Tuple[Tuple[int, ...], ...]:
    """
    Canonical representative of B g, B upper triangular, over the field GF.

    Rows are fixed from the bottom: each row is cleared at the pivot columns
    of the rows below it (bottom-most first) and scaled to a leading 1.
    Entries are returned as the integer representations of GF elements.
    """
    rows = [GF(np.array([int(x) for x in r], dtype=int)) for r in g]
    pivots = []
    for i in reversed(range(len(rows))):
        row = rows[i]
        for pc, prow in pivots:
            if row[pc] != 0:
                row = row - row[pc] * prow
        pc = next(c for c in range(len(row)) if row[c] != 0)
        row = row / row[pc]
        rows[i] = row
        pivots.append((pc, row))
    return tuple(tuple(int(x) for x in r) for r in rows)


def _coset_reps(n: int, q: int):
    """
    The canonical forms of _bruhat_key, one per coset B g of GL_n(F_q).

    Row i has a leading 1 at its pivot column, zeros at the pivots of the rows
    below, and free entries at the remaining later columns.
    """
    for pivots in itertools.permutations(range(n)):
        slots = [
            (i, c) for i in range(n)
            for c in range(pivots[i] + 1, n) if c not in pivots[i + 1:]
        ]
        for values in itertools.product(range(q), repeat=len(slots)):
            rows = [[1 if c == pivots[i] else 0 for c in range(n)] for i in range(n)]
            for (i, c), x in zip(slots, values):
                rows[i][c] = x
            yield tuple(tuple(r) for r in rows)


def ps_coinvariants_oracle(n: int, q: int, chi: Sequence[int]) -> Counter:
    """
    T(F_q)-characters of the U-bar(F_q)-coinvariants of Ind_B^G chi, G = GL_n(F_q).

    chi is an exponent vector: t -> prod t_i^{chi_i}. Returns a Counter of
    exponent vectors mod q - 1. All arithmetic happens in galois.GF(q).

    Raises:
        FieldTooLarge: n > 3 or q > 4
        DimensionMismatch: q is not a prime power, or chi has the wrong length
    """
    if n > 3 or q > MAX_FIELD_SIZE:
        raise FieldTooLarge(f"GL_{n}(F_{q}) is too large for dense linear algebra")
    if not galois.is_prime_power(q):
        raise DimensionMismatch(f"field size {q} is not a prime power")
    chi = tuple(int(c) for c in chi)
    if len(chi) != n:
        raise DimensionMismatch(f"chi needs {n} exponents")
    GF = galois.GF(q)
    order = q - 1

    # B \ G
    cosets = sorted(_coset_reps(n, q))
    index = {c: i for i, c in enumerate(cosets)}
    dim = len(cosets)

    def character(b):
        value = GF(1)
        for i in range(n):
            value = value * b[i, i] ** (chi[i] % order)
        return value

    def action(h):
        """(h.f)(x) = f(x h) on the basis of coset indicator functions"""
        M = GF.Zeros((dim, dim))
        for c_prime in cosets:
            g = GF(np.array(c_prime, dtype=int)) @ h
            key = _bruhat_key(g, GF)
            b = g @ np.linalg.inv(GF(np.array(key, dtype=int)))
            M[index[c_prime], index[key]] = character(b)
        return M

    # coinvariants: V / span{(u - 1) v}
    identity = GF.Identity(dim)
    relations = []
    for i, k in [(i, k) for i in range(n) for k in range(i)]:
        u = GF.Identity(n)
        u[i, k] = 1
        relations.append(action(u) - identity)
    W = np.concatenate(relations, axis=1) if relations else GF.Zeros((dim, 0))
    rank_w = int(np.linalg.matrix_rank(W)) if W.shape[1] else 0

    torus_actions = [
        (ts, action(GF(np.diag(ts).astype(int))))
        for ts in itertools.product(range(1, q), repeat=n)
    ]
    size_inv = (GF(1) * len(torus_actions)) ** -1

    # multiplicity of psi = rank of the psi-isotypic projector on V / W
    result: Counter = Counter()
    for psi in itertools.product(range(order), repeat=n):
        projector = GF.Zeros((dim, dim))
        for ts, M in torus_actions:
            value = GF(1)
            for t_i, e in zip(ts, psi):
                value = value * GF(t_i) ** ((-e) % order)
            projector += value * M
        projector *= size_inv
        stacked = np.concatenate([projector, W], axis=1) if W.shape[1] else projector
        multiplicity = int(np.linalg.matrix_rank(stacked)) - rank_w
        if multiplicity:
            result[tuple(psi)] += multiplicity
    logger.debug(f"coinvariants of Ind chi={chi} on GL_{n}(F_{q}): dim {dim - rank_w}, {dict(result)}")
    return result


# ---------------------------------------------------------------------------
# Cauchy-Binet
# ---------------------------------------------------------------------------

def cauchy_binet_check(A, B, k: int) -> bool:
    """Every k x k minor of AB equals a sum of 2k x 2k minors of diag(A, B)"""
    A, B = sp.Matrix(A), sp.Matrix(B)
    n = A.rows
    if A.shape != (n, n) or B.shape != (n, n):
        raise DimensionMismatch("A and B must be square of the same size")
    AB = A * B
    D = sp.diag(A, B)
    subsets = list(itertools.combinations(range(n), k))
    for rows in subsets:
        for cols in subsets:
            lhs = AB.extract(list(rows), list(cols)).det()
            rhs = sum(
                D.extract(list(rows) + [n + s for s in S], list(S) + [n + c for c in cols]).det()
                for S in subsets
            )
            if sp.expand(lhs - rhs) != 0:
                logger.debug(f"Cauchy-Binet fails at rows={rows}, cols={cols}")
                return False
    return True
