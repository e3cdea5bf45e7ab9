"""
SatakeForge - Tame inertial types and Serre weights

A tame type is declared by exponents a' and a permutation s_tau with
a'_i = q * a'_{s_tau(i)} mod p^{fr} - 1. build_type relabels the characters so
that orbits and classes are intervals, then derives digits, twisted exponents,
orientations and the lowest alcove presentation.
"""

import itertools
import logging
import random
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, List, Sequence, Tuple

from errors import InvalidExponent, InvalidPermutation, NonRegularDigits, NotRestricted
from root_data import (
    Perm, Presentation, Weight, act, all_permutations, compose, cycles, dot_action, eta,
    ExtAffWeylElt, identity_perm, inverse, is_permutation, longest_element, normalize_blocks,
    pairing, perm_order, perm_power, positive_roots, simple_roots,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TameInertialType:
    """Derived data of a tame inertial type (all indices 0-based)"""
    p: int
    e: int
    f: int
    n: int
    r: int
    a_prime: Tuple[int, ...]
    s_tau: Perm
    digits: Tuple[Tuple[int, ...], ...]          # j' -> alpha'_{j'}
    orientation: Tuple[Perm, ...]                # j' -> s_or,j'
    orbits: Tuple[Tuple[int, ...], ...]          # P_tau, each an interval
    classes: Tuple[Tuple[int, ...], ...]         # P-bar_tau as tuples of orbit indices
    relabel: Tuple[int, ...] = field(default=(), compare=False)  # new index -> input index

    @property
    def f_prime(self) -> int:
        return self.f * self.r

    @property
    def modulus(self) -> int:
        return self.p ** self.f_prime - 1

    @property
    def q(self) -> int:
        return self.p ** self.f

    def twisted_exponents(self, j_prime: int) -> Tuple[int, ...]:
        """a'^{(j')}_i = sum_k alpha'_{(k - j') mod f', i} p^k"""
        fp = self.f_prime
        return tuple(
            sum(self.digits[(k - j_prime) % fp][i] * self.p ** k for k in range(fp))
            for i in range(self.n)
        )

    def orbit_of(self, i: int) -> int:
        for k, orbit in enumerate(self.orbits):
            if i in orbit:
                return k
        raise IndexError(i)

    def class_of_orbit(self, k: int) -> int:
        for c, members in enumerate(self.classes):
            if k in members:
                return c
        raise IndexError(k)

    def class_size(self, c: int) -> int:
        """#Ibar: number of orbits in the class"""
        return len(self.classes[c])

    def orbit_size_of_class(self, c: int) -> int:
        """n_Ibar: common size of the orbits in the class"""
        return len(self.orbits[self.classes[c][0]])

    def is_principal_series(self) -> bool:
        return self.r == 1

    def is_regular(self) -> bool:
        return all(len(c) == 1 for c in self.classes)

    def to_dict(self) -> Dict:
        return {
            'p': self.p, 'e': self.e, 'f': self.f, 'n': self.n, 'r': self.r,
            'a_prime': list(self.a_prime),
            's_tau': [i + 1 for i in self.s_tau],
            'digits': [list(d) for d in self.digits],
            'orientation': [[i + 1 for i in w] for w in self.orientation],
            'orbits': [[i + 1 for i in orb] for orb in self.orbits],
            'classes': [[k + 1 for k in c] for c in self.classes],
        }


def _digits(value: int, p: int, count: int) -> List[int]:
    out = []
    for _ in range(count):
        out.append(value % p)
        value //= p
    return out


def _validate_s_tau(p: int, f: int, a_prime: Sequence[int], s_tau: Perm) -> int:
    """Check the congruence and orbit minimality; returns the level r"""
    n = len(a_prime)
    if not is_permutation(s_tau, n):
        raise InvalidPermutation(f"s_tau={s_tau} is not a permutation of {n} letters")
    r = perm_order(s_tau)
    modulus = p ** (f * r) - 1
    q = p ** f
    for i, a in enumerate(a_prime):
        if not (0 <= a < modulus):
            raise InvalidExponent(f"a'_{i + 1}={a} outside [0, {modulus}) for p={p}, f={f}, r={r}")
    for i in range(n):
        if (a_prime[i] - q * a_prime[s_tau[i]]) % modulus != 0:
            raise InvalidPermutation(
                f"a'_{i + 1}={a_prime[i]} is not q*a'_{s_tau[i] + 1} mod {modulus}; "
                f"s_tau does not match the exponents"
            )
    for orbit in cycles(s_tau):
        values = [a_prime[i] for i in orbit]
        if len(set(values)) != len(values):
            raise InvalidPermutation(
                f"orbit {[i + 1 for i in orbit]} repeats a character; s_tau is not minimal there")
    return r


def _canonical_order(p: int, fp: int, a_prime: Sequence[int], s_tau: Perm) -> List[int]:
    """Classes, then orbits, then exponent descending (by a'^{(f'-1)})"""
    modulus = p ** fp - 1
    last = [(a * pow(p, fp - 1)) % modulus if a != modulus else a for a in a_prime]
    orbits = sorted(cycles(s_tau), key=min)
    groups: Dict[frozenset, List[Tuple[int, ...]]] = {}
    for orbit in orbits:
        groups.setdefault(frozenset(a_prime[i] for i in orbit), []).append(orbit)
    ordered_groups = sorted(
        groups.values(),
        key=lambda members: (-max(last[i] for orb in members for i in orb), min(min(o) for o in members)),
    )
    order = []
    for members in ordered_groups:
        for orbit in members:
            order.extend(sorted(orbit, key=lambda i: (-last[i], i)))
    return order


def build_type(p: int, e: int, f: int, n: int, a_prime: Sequence[int], s_tau: Sequence[int]) -> TameInertialType:
    """
    Build a tame inertial type from exponents and s_tau (0-based permutation).

    Raises:
        InvalidExponent: an exponent is outside [0, p^{fr} - 1)
        InvalidPermutation: s_tau is not compatible with the exponents
    """
    a_prime = tuple(int(a) for a in a_prime)
    s_tau = tuple(int(i) for i in s_tau)
    if len(a_prime) != n:
        raise InvalidExponent(f"expected {n} exponents, got {len(a_prime)}")
    r = _validate_s_tau(p, f, a_prime, s_tau)
    fp = f * r

    # Relabel: new index k carries input index order[k]
    order = _canonical_order(p, fp, a_prime, s_tau)
    pos = inverse(tuple(order))
    a_new = tuple(a_prime[order[k]] for k in range(n))
    s_new = tuple(pos[s_tau[order[k]]] for k in range(n))

    per_index = [_digits(a, p, fp) for a in a_new]
    digits = tuple(tuple(per_index[i][jp] for i in range(n)) for jp in range(fp))
    for jp in range(fp):
        expected = act(inverse(s_new), digits[jp])
        if digits[(jp + f) % fp] != expected:
            raise InvalidPermutation(f"digit relation fails at j'={jp}: {digits[(jp + f) % fp]} != {expected}")

    orbits = tuple(sorted((tuple(sorted(c)) for c in cycles(s_new)), key=min))
    groups: Dict[frozenset, List[int]] = {}
    for k, orbit in enumerate(orbits):
        groups.setdefault(frozenset(a_new[i] for i in orbit), []).append(k)
    classes = tuple(sorted((tuple(v) for v in groups.values()), key=min))

    t = TameInertialType(
        p=p, e=e, f=f, n=n, r=r, a_prime=a_new, s_tau=s_new, digits=digits,
        orientation=(), orbits=orbits, classes=classes, relabel=tuple(order),
    )
    base = tuple(_smallest_sorter(t.twisted_exponents(j)) for j in range(f))
    t = replace(t, orientation=extend_orientation(t, base))
    logger.debug(f"Built type a'={a_new} s_tau={s_new} r={r} orbits={orbits}")
    return t


def _smallest_sorter(values: Sequence[int]) -> Perm:
    """Lexicographically smallest w with w^{-1}(values) dominant"""
    return tuple(sorted(range(len(values)), key=lambda i: (-values[i], i)))


def _sorts(w: Perm, values: Sequence[int]) -> bool:
    return all(values[w[i]] >= values[w[i + 1]] for i in range(len(w) - 1))


def extend_orientation(t: TameInertialType, base: Sequence[Perm]) -> Tuple[Perm, ...]:
    """s_or,{j + k f} = s_tau^k s_or,j"""
    out = []
    for jp in range(t.f_prime):
        k, j = divmod(jp, t.f)
        out.append(compose(perm_power(t.s_tau, k), tuple(base[j])))
    return tuple(out)


def valid_orientations(t: TameInertialType) -> List[Tuple[Perm, ...]]:
    """Every admissible (s_or,0, ..., s_or,f-1)"""
    per_j = []
    for j in range(t.f):
        values = t.twisted_exponents(j)
        per_j.append([w for w in all_permutations(t.n) if _sorts(w, values)])
    return [tuple(choice) for choice in itertools.product(*per_j)]


def valid_s_tau_choices(p: int, f: int, n: int, a_prime: Sequence[int]) -> List[Perm]:
    """All permutations that build_type would accept for these exponents"""
    out = []
    for w in all_permutations(n):
        try:
            _validate_s_tau(p, f, a_prime, w)
        except (InvalidPermutation, InvalidExponent):
            continue
        out.append(w)
    return out


def presentation_for_orientation(t: TameInertialType, base: Sequence[Perm]) -> Presentation:
    """
    s_j = s_or,{j-1}^{-1} s_or,j and mu_j + eta = s_or,{j-1}^{-1}(alpha'_{-j}),
    indices of s_or cyclic mod f'.
    """
    full = extend_orientation(t, base)
    fp = t.f_prime
    e = eta(t.n).entries[0]
    s, mus = [], []
    for j in range(t.f):
        prev_inv = inverse(full[(j - 1) % fp])
        s.append(compose(prev_inv, full[j]))
        shifted = act(prev_inv, t.digits[(-j) % fp])
        mus.append(tuple(a - b for a, b in zip(shifted, e)))
    mu = Weight(tuple(mus))
    non_regular = not (mu + eta(t.n, t.f)).is_regular()
    if non_regular:
        logger.warning(f"⚠️  Non-regular digits for a'={t.a_prime}: presentation is not a genuine lowest alcove one")
        warnings.warn(f"non-regular digits for a'={t.a_prime}", NonRegularDigits)
    return Presentation(tuple(s), mu, non_regular=non_regular)


def lowest_alcove_presentation(t: TameInertialType) -> Presentation:
    return presentation_for_orientation(t, t.orientation[:t.f])


def is_m_generic(t: TameInertialType, m: int) -> bool:
    """Some lowest alcove presentation has m < <mu + eta, alpha> < p - m"""
    if t.n == 1:
        return m < t.p
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', NonRegularDigits)
        return any(
            presentation_for_orientation(t, base).is_m_generic(m, t.p)
            for base in valid_orientations(t)
        )


def dual(t: TameInertialType) -> TameInertialType:
    """a' -> -a' mod p^{fr} - 1, same orbit structure, canonicalized"""
    negated = [(-a) % t.modulus for a in t.a_prime]
    return build_type(t.p, t.e, t.f, t.n, negated, t.s_tau)


# ---------------------------------------------------------------------------
# Serre weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SerreWeight:
    """F(lambda) with lambda_1 the per-embedding restricted presentation"""
    p: int
    f: int
    n: int
    lambda_1: Weight
    lambda_f: Tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p ** self.f

    def to_dict(self) -> Dict:
        return {'p': self.p, 'f': self.f, 'n': self.n, 'lambda': self.lambda_1.to_list()}


def combine_embeddings(components: Sequence[Sequence[int]], p: int) -> Tuple[int, ...]:
    """sum_j c_j p^{(f - j) mod f}"""
    f = len(components)
    n = len(components[0])
    return tuple(sum(components[j][i] * p ** ((f - j) % f) for j in range(f)) for i in range(n))


def serre_weight(p: int, f: int, n: int, lambda_1) -> SerreWeight:
    """
    Build F(lambda) from per-embedding weights.

    Args:
        lambda_1: Weight, or list of f integer n-vectors

    Raises:
        NotRestricted: some embedding component is not p-restricted dominant
    """
    lam = lambda_1 if isinstance(lambda_1, Weight) else Weight(tuple(tuple(c) for c in lambda_1))
    if (lam.n, lam.f) != (n, f):
        raise NotRestricted(f"lambda has shape (n={lam.n}, f={lam.f}), expected ({n}, {f})")
    for j, comp in enumerate(lam.entries):
        for i in range(n - 1):
            gap = comp[i] - comp[i + 1]
            if not (0 <= gap <= p - 1):
                raise NotRestricted(f"embedding {j}: <lambda, alpha_{i + 1}> = {gap} not in [0, {p - 1}]")
    return SerreWeight(p=p, f=f, n=n, lambda_1=lam, lambda_f=combine_embeddings(lam.entries, p))


@dataclass(frozen=True)
class SWPredicates:
    non_steinberg: bool
    M_regular: bool
    regular: bool
    m_deep: bool


def _stabilizer_pairs(sigma: SerreWeight) -> List[Tuple[int, int]]:
    mod = sigma.q - 1
    lam = sigma.lambda_f
    return [(i, k) for i, k in itertools.combinations(range(sigma.n), 2) if (lam[i] - lam[k]) % mod == 0]


def is_m_deep(sigma: SerreWeight, m: int) -> bool:
    """n_alpha p + m < <lambda + eta, alpha> < (n_alpha + 1) p - m for every positive root"""
    shifted = sigma.lambda_1 + eta(sigma.n, sigma.f)
    for j in range(sigma.f):
        for alpha in positive_roots(sigma.n):
            val = pairing(shifted, alpha, j)
            n_alpha = val // sigma.p
            if not (n_alpha * sigma.p + m < val < (n_alpha + 1) * sigma.p - m):
                return False
    return True


def deepness(sigma: SerreWeight) -> int:
    """Largest m with sigma m-deep, -1 if not even 0-deep"""
    m = -1
    while m + 1 < sigma.p and is_m_deep(sigma, m + 1):
        m += 1
    return m


def sw_predicates(sigma: SerreWeight, M_blocks, m: int) -> SWPredicates:
    blocks = normalize_blocks(sigma.n, M_blocks)
    block_of = {i: b for b, members in enumerate(blocks) for i in members}
    pairs = _stabilizer_pairs(sigma)
    non_steinberg = all(
        sigma.lambda_f[i - 1] - sigma.lambda_f[k - 1] < sigma.q - 1 for i, k in simple_roots(sigma.n)
    )
    return SWPredicates(
        non_steinberg=non_steinberg,
        M_regular=all(block_of[i] == block_of[k] for i, k in pairs),
        regular=not pairs,
        m_deep=is_m_deep(sigma, m),
    )


def principal_series_type_of(sigma: SerreWeight, e: int = 1) -> TameInertialType:
    """tau(1, mu): digits alpha'_k = mu_{(f - k) mod f} + eta, s_tau = 1"""
    shifted = sigma.lambda_1 + eta(sigma.n, sigma.f)
    f, p = sigma.f, sigma.p
    digits = [shifted.entries[(f - k) % f] for k in range(f)]
    for k, d in enumerate(digits):
        if any(not (0 <= x <= p - 1) for x in d):
            raise InvalidExponent(f"digit alpha'_{k}={d} leaves [0, {p - 1}]; weight too close to the walls")
    a_prime = [sum(digits[k][i] * p ** k for k in range(f)) for i in range(sigma.n)]
    return build_type(p, e, f, sigma.n, a_prime, identity_perm(sigma.n))


def R_operator(sigma: SerreWeight) -> SerreWeight:
    """F(mu) -> F(w_0 . (mu - p eta))"""
    w0 = ExtAffWeylElt.finite([longest_element(sigma.n)] * sigma.f)
    moved = dot_action(w0, sigma.lambda_1 - eta(sigma.n, sigma.f).scale(sigma.p))
    try:
        return serre_weight(sigma.p, sigma.f, sigma.n, moved)
    except NotRestricted as e:
        raise NotRestricted(f"R(F({sigma.lambda_1.to_list()})) leaves the restricted region: {e}")


# ---------------------------------------------------------------------------
# Random samples
# ---------------------------------------------------------------------------

def random_type(rng: random.Random, p: int, n: int, f: int, e: int = 1, principal: bool = False,
                tries: int = 100) -> TameInertialType:
    """
    A random tame type: random s_tau (identity when principal), exponents
    generated orbit by orbit from a'_{s(i)} = q^{-1} a'_i. Orbits of equal
    length sometimes share their exponents, giving classes with several orbits.
    """
    q = p ** f
    for _ in range(tries):
        s = list(range(n))
        if not principal:
            rng.shuffle(s)
        s = tuple(s)
        r = perm_order(s)
        modulus = q ** r - 1
        a_prime = [0] * n
        starts: Dict[int, List[int]] = {}
        ok = True
        for orbit in cycles(s):
            size = len(orbit)
            if starts.get(size) and rng.random() < 0.3:
                a0 = rng.choice(starts[size])
            else:
                a0 = rng.randrange(q ** size - 1) * (modulus // (q ** size - 1))
            values = [(a0 * pow(q, (r - 1) * k, modulus)) % modulus for k in range(size)]
            if len(set(values)) != size:
                ok = False
                break
            starts.setdefault(size, []).append(a0)
            cur = orbit[0]
            for v in values:
                a_prime[cur] = v
                cur = s[cur]
        if ok:
            return build_type(p, e, f, n, a_prime, s)
    raise InvalidExponent(f"no random type found for p={p}, n={n}, f={f}")


def random_deep_weight(rng: random.Random, p: int, n: int, f: int, m: int) -> SerreWeight:
    """
    A random m-deep Serre weight with lambda + eta inside [0, p - 2].

    Sampled directly in the lowest alcove: consecutive entries of lambda + eta
    differ by at least m + 1 and the total spread stays below p - m, so every
    <lambda + eta, alpha> lies in (m, p - m). principal_series_type_of accepts
    every sample.

    Raises:
        NotRestricted: p < n(m + 1), where the lowest alcove has no m-deep weight
    """
    top = min(p - m - 1, p - 2)
    base = (n - 1) * (m + 1)
    if base > top:
        raise NotRestricted(f"no {m}-deep weight in the lowest alcove for p={p}, n={n}")
    comps = []
    for _ in range(f):
        extra = rng.randint(0, top - base) if n > 1 else 0
        cuts = sorted(rng.randint(0, extra) for _ in range(n - 2))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [extra])] if n > 1 else []
        gaps = [m + 1 + x for x in parts]
        comp = [rng.randint(0, p - 2 - sum(gaps))]
        for g in reversed(gaps):
            comp.append(comp[-1] + g)
        shifted = list(reversed(comp))
        comps.append(tuple(x - (n - 1 - i) for i, x in enumerate(shifted)))
    sigma = serre_weight(p, f, n, comps)
    logger.debug(f"random {m}-deep weight {sigma.lambda_1.to_list()} at p={p}")
    return sigma
