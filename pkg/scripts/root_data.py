"""
SatakeForge - Root datum of GL_n with f embeddings

Weights, permutations acting on positions, the extended affine Weyl group
t_nu w, the dot action and lowest alcove presentations.

Conventions:
    - a permutation is a tuple w of 0-based images, w(mu)_i = mu_{w^{-1}(i)}
    - roots are written 1-based: alpha = (i, k) means e_i - e_k
    - embeddings j = 0..f-1; the rotation pi moves component j to j+1
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import sympy as sp

from errors import DimensionMismatch, IndexOutOfRange, InvalidPartition

logger = logging.getLogger(__name__)

Perm = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------

def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def compose(w1: Perm, w2: Perm) -> Perm:
    """w1 o w2"""
    if len(w1) != len(w2):
        raise DimensionMismatch(f"Cannot compose permutations of sizes {len(w1)} and {len(w2)}")
    return tuple(w1[w2[i]] for i in range(len(w2)))


def inverse(w: Perm) -> Perm:
    out = [0] * len(w)
    for i, wi in enumerate(w):
        out[wi] = i
    return tuple(out)


def act(w: Perm, vec: Sequence) -> tuple:
    """w(vec)_i = vec_{w^{-1}(i)}"""
    if len(w) != len(vec):
        raise DimensionMismatch(f"Permutation of size {len(w)} cannot act on a vector of length {len(vec)}")
    out = [None] * len(vec)
    for i, wi in enumerate(w):
        out[wi] = vec[i]
    return tuple(out)


def length(w: Perm) -> int:
    """Number of inversions"""
    return sum(1 for i, k in itertools.combinations(range(len(w)), 2) if w[i] > w[k])


def is_permutation(w: Sequence[int], n: int) -> bool:
    return len(w) == n and sorted(w) == list(range(n))


@lru_cache(maxsize=None)
def all_permutations(n: int) -> Tuple[Perm, ...]:
    return tuple(itertools.permutations(range(n)))


def longest_element(n: int) -> Perm:
    return tuple(range(n - 1, -1, -1))


def perm_power(w: Perm, k: int) -> Perm:
    if k < 0:
        return perm_power(inverse(w), -k)
    out = identity_perm(len(w))
    for _ in range(k):
        out = compose(w, out)
    return out


def perm_order(w: Perm) -> int:
    k, cur = 1, w
    while cur != identity_perm(len(w)):
        cur = compose(w, cur)
        k += 1
    return k


def cycles(w: Perm) -> List[Tuple[int, ...]]:
    """Orbits of w, each listed in first-seen order starting from its smallest element"""
    seen, out = set(), []
    for start in range(len(w)):
        if start in seen:
            continue
        orbit, cur = [], start
        while cur not in seen:
            seen.add(cur)
            orbit.append(cur)
            cur = w[cur]
        out.append(tuple(orbit))
    return out


def permutation_matrix(w: Perm) -> sp.Matrix:
    """P_w e_a = e_{w(a)}, so Ad(w)(X) = P_w X P_w^{-1}"""
    n = len(w)
    return sp.Matrix(n, n, lambda i, k: 1 if w[k] == i else 0)


def positive_roots(n: int) -> List[Tuple[int, int]]:
    return [(i, k) for i in range(1, n + 1) for k in range(i + 1, n + 1)]


def simple_roots(n: int) -> List[Tuple[int, int]]:
    return [(i, i + 1) for i in range(1, n)]


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Weight:
    """An f-tuple of integer n-vectors (character or cocharacter, by context)"""
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        entries = tuple(tuple(int(x) for x in comp) for comp in self.entries)
        if not entries:
            raise DimensionMismatch("A weight needs at least one embedding component")
        n = len(entries[0])
        if any(len(comp) != n for comp in entries):
            raise DimensionMismatch(f"Every embedding component must have {n} entries: {entries}")
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def of(cls, *components: Sequence[int]) -> 'Weight':
        return cls(tuple(tuple(c) for c in components))

    @classmethod
    def zero(cls, n: int, f: int = 1) -> 'Weight':
        return cls(tuple((0,) * n for _ in range(f)))

    @property
    def n(self) -> int:
        return len(self.entries[0])

    @property
    def f(self) -> int:
        return len(self.entries)

    def component(self, j: int) -> Tuple[int, ...]:
        return self.entries[j]

    def _check(self, other: 'Weight'):
        if (self.n, self.f) != (other.n, other.f):
            raise DimensionMismatch(f"Weights of shape (n={self.n}, f={self.f}) and (n={other.n}, f={other.f})")

    def __add__(self, other: 'Weight') -> 'Weight':
        self._check(other)
        return Weight(tuple(tuple(a + b for a, b in zip(x, y)) for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: 'Weight') -> 'Weight':
        return self + (-other)

    def __neg__(self) -> 'Weight':
        return Weight(tuple(tuple(-a for a in x) for x in self.entries))

    def scale(self, c: int) -> 'Weight':
        return Weight(tuple(tuple(c * a for a in x) for x in self.entries))

    def is_dominant(self) -> bool:
        return all(all(x[i] >= x[i + 1] for i in range(len(x) - 1)) for x in self.entries)

    def is_antidominant(self) -> bool:
        return all(all(x[i] <= x[i + 1] for i in range(len(x) - 1)) for x in self.entries)

    def is_regular(self) -> bool:
        return all(len(set(x)) == len(x) for x in self.entries)

    def to_list(self) -> List[List[int]]:
        return [list(x) for x in self.entries]


def eta(n: int, f: int = 1) -> Weight:
    """eta = (n-1, ..., 1, 0) in every embedding"""
    return Weight(tuple(tuple(range(n - 1, -1, -1)) for _ in range(f)))


def w0_eta(n: int, f: int = 1) -> Weight:
    """w_0(eta) = (0, 1, ..., n-1)"""
    return Weight(tuple(tuple(range(n)) for _ in range(f)))


def fundamental_coweight(n: int, i: int, f: int = 1) -> Weight:
    """omega_i = (1,...,1,0,...,0) with i ones"""
    return Weight(tuple(tuple(1 if k < i else 0 for k in range(n)) for _ in range(f)))


def pairing(lam: Weight, alpha_coroot: Tuple[int, int], embedding: int = 0) -> int:
    """<lambda, alpha^vee> for alpha = e_i - e_k (1-based i, k)"""
    i, k = alpha_coroot
    if not (0 <= embedding < lam.f):
        raise IndexOutOfRange(f"embedding {embedding} not in [0, {lam.f})")
    if not (1 <= i <= lam.n and 1 <= k <= lam.n):
        raise IndexOutOfRange(f"root indices ({i}, {k}) not in [1, {lam.n}]")
    comp = lam.entries[embedding]
    return comp[i - 1] - comp[k - 1]


def act_weight(ws: Sequence[Perm], lam: Weight) -> Weight:
    if len(ws) != lam.f:
        raise DimensionMismatch(f"{len(ws)} permutations for a weight with f={lam.f}")
    return Weight(tuple(act(w, x) for w, x in zip(ws, lam.entries)))


def rotate_weight(lam: Weight) -> Weight:
    """pi(lambda)_j = lambda_{j-1}"""
    f = lam.f
    return Weight(tuple(lam.entries[(j - 1) % f] for j in range(f)))


def rotate_perms(ws: Sequence[Perm]) -> Tuple[Perm, ...]:
    f = len(ws)
    return tuple(ws[(j - 1) % f] for j in range(f))


# ---------------------------------------------------------------------------
# Extended affine Weyl group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtAffWeylElt:
    """t_nu w, componentwise over the f embeddings"""
    translation: Weight
    finite_part: Tuple[Perm, ...]

    def __post_init__(self):
        finite = tuple(tuple(w) for w in self.finite_part)
        if len(finite) != self.translation.f:
            raise DimensionMismatch(
                f"{len(finite)} finite components for a translation with f={self.translation.f}")
        for w in finite:
            if not is_permutation(w, self.translation.n):
                raise DimensionMismatch(f"{w} is not a permutation of size {self.translation.n}")
        object.__setattr__(self, 'finite_part', finite)

    @classmethod
    def identity(cls, n: int, f: int = 1) -> 'ExtAffWeylElt':
        return cls(Weight.zero(n, f), tuple(identity_perm(n) for _ in range(f)))

    @classmethod
    def translation_by(cls, nu: Weight) -> 'ExtAffWeylElt':
        return cls(nu, tuple(identity_perm(nu.n) for _ in range(nu.f)))

    @classmethod
    def finite(cls, ws: Sequence[Perm]) -> 'ExtAffWeylElt':
        ws = tuple(tuple(w) for w in ws)
        return cls(Weight.zero(len(ws[0]), len(ws)), ws)

    @property
    def n(self) -> int:
        return self.translation.n

    @property
    def f(self) -> int:
        return self.translation.f

    def __mul__(self, other: 'ExtAffWeylElt') -> 'ExtAffWeylElt':
        """(t_nu w)(t_nu' w') = t_{nu + w(nu')} w w'"""
        if (self.n, self.f) != (other.n, other.f):
            raise DimensionMismatch("Extended affine Weyl elements of different shapes")
        nu = self.translation + act_weight(self.finite_part, other.translation)
        ws = tuple(compose(a, b) for a, b in zip(self.finite_part, other.finite_part))
        return ExtAffWeylElt(nu, ws)

    def inverse(self) -> 'ExtAffWeylElt':
        winv = tuple(inverse(w) for w in self.finite_part)
        return ExtAffWeylElt(-act_weight(winv, self.translation), winv)

    def rotate(self) -> 'ExtAffWeylElt':
        return ExtAffWeylElt(rotate_weight(self.translation), rotate_perms(self.finite_part))


def dot_action(w: ExtAffWeylElt, mu: Weight) -> Weight:
    """t_nu w . mu = nu + w(mu + eta) - eta"""
    if (w.n, w.f) != (mu.n, mu.f):
        raise DimensionMismatch(f"Cannot act by an element of shape ({w.n}, {w.f}) on a weight of shape ({mu.n}, {mu.f})")
    e = eta(mu.n, mu.f)
    return w.translation + act_weight(w.finite_part, mu + e) - e


def is_in_C0(mu: Weight, p: int) -> bool:
    """0 < <mu + eta, alpha^vee> < p for every positive root and embedding"""
    shifted = mu + eta(mu.n, mu.f)
    return all(
        0 < pairing(shifted, alpha, j) < p
        for j in range(mu.f) for alpha in positive_roots(mu.n)
    )


@dataclass(frozen=True)
class Presentation:
    """Lowest alcove presentation (s, mu)"""
    s: Tuple[Perm, ...]
    mu: Weight
    non_regular: bool = False

    def __post_init__(self):
        s = tuple(tuple(w) for w in self.s)
        if len(s) != self.mu.f:
            raise DimensionMismatch(f"{len(s)} permutations for a weight with f={self.mu.f}")
        object.__setattr__(self, 's', s)

    def is_m_generic(self, m: int, p: int) -> bool:
        """m < <mu + eta, alpha^vee> < p - m for all positive roots"""
        shifted = self.mu + eta(self.mu.n, self.mu.f)
        return all(
            m < pairing(shifted, alpha, j) < p - m
            for j in range(self.mu.f) for alpha in positive_roots(self.mu.n)
        )


def twist_presentation(w: ExtAffWeylElt, pres: Presentation) -> Presentation:
    """^{w}(s, mu) = (w s pi(w)^{-1}, w.mu - w s pi(w)^{-1} pi(nu))"""
    if (w.n, w.f) != (pres.mu.n, pres.mu.f):
        raise DimensionMismatch("Twisting element and presentation have different shapes")
    rot_w = rotate_perms(w.finite_part)
    new_s = tuple(
        compose(compose(wj, sj), inverse(rj))
        for wj, sj, rj in zip(w.finite_part, pres.s, rot_w)
    )
    shift = act_weight(new_s, rotate_weight(w.translation))
    return Presentation(new_s, dot_action(w, pres.mu) - shift)


# ---------------------------------------------------------------------------
# Levi subgroups and cosets
# ---------------------------------------------------------------------------

def normalize_blocks(n: int, levi_blocks) -> List[Tuple[int, ...]]:
    """
    Accept block sizes [2, 1] or 1-based index blocks [[1, 2], [3]] and
    return 0-based interval blocks.
    """
    if not levi_blocks:
        raise InvalidPartition("Empty Levi partition")
    if all(isinstance(b, int) for b in levi_blocks):
        blocks, start = [], 0
        for size in levi_blocks:
            if size <= 0:
                raise InvalidPartition(f"Block sizes must be positive: {levi_blocks}")
            blocks.append(tuple(range(start, start + size)))
            start += size
    else:
        blocks = [tuple(i - 1 for i in b) for b in levi_blocks]
    flat = [i for b in blocks for i in b]
    if sorted(flat) != list(range(n)):
        raise InvalidPartition(f"{levi_blocks} does not partition {{1..{n}}}")
    for b in blocks:
        if list(b) != list(range(b[0], b[0] + len(b))):
            raise InvalidPartition(f"Block {[i + 1 for i in b]} is not an interval")
    return sorted(blocks)


def levi_simple_roots(n: int, levi_blocks) -> List[int]:
    """0-based i such that s_i = (i, i+1) lies in W_M"""
    blocks = normalize_blocks(n, levi_blocks)
    return [i for b in blocks for i in b[:-1]]


def levi_weyl_group(n: int, levi_blocks) -> List[Perm]:
    blocks = normalize_blocks(n, levi_blocks)
    out = []
    for w in all_permutations(n):
        if all(w[i] in b for b in blocks for i in b):
            out.append(w)
    return out


def wM_reps(n: int, levi_blocks) -> List[Perm]:
    """Minimal length representatives of W_M \\ W: l(s_alpha w) > l(w) for alpha in Delta_M"""
    simple = levi_simple_roots(n, levi_blocks)
    reps = []
    for w in all_permutations(n):
        winv = inverse(w)
        if all(winv[i] < winv[i + 1] for i in simple):
            reps.append(w)
    return reps


def levi_decompose(w: Perm, levi_blocks) -> Tuple[Perm, Perm]:
    """w = w_M w^M with w_M in W_M and w^M a minimal length representative"""
    reps = set(wM_reps(len(w), levi_blocks))
    for u in levi_weyl_group(len(w), levi_blocks):
        cand = compose(inverse(u), w)
        if cand in reps:
            return u, cand
    raise InvalidPartition(f"No coset representative found for {w}")


def antidominant_orbit_rep(mu: Weight) -> Tuple[Weight, Tuple[Perm, ...]]:
    """Sort each component ascending; returns (antidominant weight, w with w(mu) = result)"""
    perms = []
    for comp in mu.entries:
        order = sorted(range(len(comp)), key=lambda i: comp[i])  # order = w^{-1}
        perms.append(inverse(tuple(order)))
    perms = tuple(perms)
    return act_weight(perms, mu), perms
