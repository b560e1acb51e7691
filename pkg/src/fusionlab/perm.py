"""Finite permutation groups by explicit element enumeration.

Permutations are tuples of 0-based images; ``compose(a, b)`` applies ``b``
first.  A :class:`PermGroup` owns a canonically sorted element list (so the
identity always has index 0) and every :class:`Subgroup` is a set of indices
into that list.  Groups here are small, so element scans replace BSGS
machinery throughout.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property, reduce
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    MalformedPermutation,
    NotAPGroup,
    NotNormal,
    OrderCapExceeded,
    SubgroupCapExceeded,
)

ORDER_CAP = 10**6
SUBGROUP_CAP = 20000
TABLE_CAP = 5000

Perm = tuple


def compose(a: Perm, b: Perm) -> Perm:
    return tuple(a[i] for i in b)


def invert(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def perm_from_cycles(degree: int, cycles: Sequence[Sequence[int]]) -> Perm:
    """Build a permutation from 1-based disjoint cycles."""
    img = list(range(degree))
    seen = set()
    for cyc in cycles:
        for x in cyc:
            if not isinstance(x, int) or x < 1 or x > degree or x in seen:
                raise MalformedPermutation(f"bad cycle {cyc!r} for degree {degree}")
            seen.add(x)
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            img[a - 1] = b - 1
    return tuple(img)


def check_perm(img: Sequence[int], degree: int) -> Perm:
    img = tuple(int(x) for x in img)
    if len(img) != degree or sorted(img) != list(range(degree)):
        raise MalformedPermutation(f"{img!r} is not a bijection of {degree} points")
    return img


def cycles_of(perm: Perm) -> list[list[int]]:
    """Nontrivial cycles, 1-based."""
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = perm[j]
        out.append(cyc)
    return out


def perm_order(perm: Perm) -> int:
    lengths = [len(c) for c in cycles_of(perm)]
    return reduce(lambda a, b: a * b // gcd(a, b), lengths, 1)


def p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def is_p_power(n: int, p: int) -> bool:
    return p_part(n, p) == n


class PermGroup:
    """A permutation group with its full, canonically ordered element list."""

    def __init__(self, degree: int, generators: Iterable[Perm], cap: int = ORDER_CAP):
        self.degree = degree
        gens = [check_perm(g, degree) for g in generators]
        ident = identity_perm(degree)
        self.generators = tuple(g for g in dict.fromkeys(gens) if g != ident)
        seen = {ident}
        queue = deque([ident])
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > cap:
                        raise OrderCapExceeded(f"group exceeds {cap} elements")
                    queue.append(y)
        self.elements: tuple[Perm, ...] = tuple(sorted(seen))
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.order = len(self.elements)

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, order={self.order})"

    def __len__(self):
        return self.order

    @cached_property
    def table(self) -> np.ndarray:
        """Multiplication table: table[i, j] = index of elements[i] * elements[j]."""
        n = self.order
        if n > TABLE_CAP:
            raise OrderCapExceeded(f"multiplication table limited to {TABLE_CAP} elements")
        E = np.array(self.elements, dtype=np.int64).reshape(n, self.degree)
        out = np.empty((n, n), dtype=np.int64)
        if self.degree <= 15:
            weights = self.degree ** np.arange(self.degree - 1, -1, -1, dtype=np.int64)
            codes = E @ weights
            for i in range(n):
                out[i] = np.searchsorted(codes, E[i][E] @ weights)
        else:
            for i in range(n):
                out[i] = [self.index[tuple(r)] for r in E[i][E].tolist()]
        return out

    @cached_property
    def inverses(self) -> np.ndarray:
        return np.array([self.index[invert(e)] for e in self.elements], dtype=np.int64)

    @cached_property
    def orders(self) -> np.ndarray:
        return np.array([perm_order(e) for e in self.elements], dtype=np.int64)

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inv(self, i: int) -> int:
        return int(self.inverses[i])

    def conj(self, g: int, x: int) -> int:
        """g x g^-1."""
        t = self.table
        return int(t[t[g, x], self.inverses[g]])

    def idx(self, perm: Perm) -> int:
        return self.index[tuple(perm)]

    def word_product(self, idxs: Iterable[int]) -> int:
        out = 0
        for i in idxs:
            out = self.mul(out, i)
        return out

    @cached_property
    def full(self) -> "Subgroup":
        return Subgroup(self, frozenset(range(self.order)),
                        tuple(self.index[g] for g in self.generators))

    def subgroup(self, gens: Iterable[int]) -> "Subgroup":
        return generate(self, gens)


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup of ``group``, stored as a frozenset of element indices."""

    group: PermGroup
    elements: frozenset
    gens: tuple

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.group is other.group and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __le__(self, other):
        return self.elements <= other.elements

    def __lt__(self, other):
        return self.elements < other.elements

    def __contains__(self, x):
        return x in self.elements

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"Subgroup(order={self.order})"

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def sorted(self) -> tuple:
        return tuple(sorted(self.elements))

    @property
    def key(self):
        """Canonical sort key: order first, then sorted element list."""
        return (self.order, self.sorted)

    def perms(self) -> list:
        return [self.group.elements[i] for i in self.sorted]

    def is_trivial(self) -> bool:
        return self.order == 1


def _as_sub(G) -> Subgroup:
    return G.full if isinstance(G, PermGroup) else G


def closure(group: PermGroup, gens: Iterable[int], start: Iterable[int] = (0,)) -> frozenset:
    gens = [g for g in dict.fromkeys(gens) if g != 0]
    t = group.table
    seen = set(start)
    seen.add(0)
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for g in gens:
            y = int(t[x, g])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


def generate(group: PermGroup, gens: Iterable[int]) -> Subgroup:
    """Subgroup generated by element indices; keeps a short generator list."""
    kept, elems = [], frozenset([0])
    for g in sorted(set(gens)):
        if g not in elems:
            kept.append(g)
            elems = closure(group, kept)
    return Subgroup(group, elems, tuple(kept))


def join(H: Subgroup, K: Subgroup) -> Subgroup:
    gens = list(H.gens) + [g for g in K.gens if g not in H.elements]
    return generate(H.group, gens)


def intersection(H: Subgroup, K: Subgroup) -> Subgroup:
    return generate(H.group, H.elements & K.elements)


def trivial_subgroup(G) -> Subgroup:
    G = _as_sub(G)
    return Subgroup(G.group, frozenset([0]), ())


def group_from_generators(degree: int, generators: Iterable, cap: int = ORDER_CAP) -> PermGroup:
    """Group generated by permutations given as 1-based cycle lists or image tuples."""
    perms = []
    for g in generators:
        g = list(g)
        if g and all(isinstance(c, (list, tuple)) for c in g):
            perms.append(perm_from_cycles(degree, g))
        elif not g:
            perms.append(identity_perm(degree))
        else:
            perms.append(check_perm(g, degree))
    return PermGroup(degree, perms, cap=cap)


# -- conjugation, normalizers, centralizers -------------------------------


def conjugate(P: Subgroup, g: int) -> Subgroup:
    """g P g^-1."""
    grp = P.group
    return Subgroup(grp, frozenset(grp.conj(g, x) for x in P.elements),
                    tuple(grp.conj(g, x) for x in P.gens))


def conjugates_into(g: int, P: Subgroup, Q: Subgroup) -> bool:
    grp = P.group
    return all(grp.conj(g, x) in Q.elements for x in P.gens)


def transporter(G, P: Subgroup, Q: Subgroup) -> list[int]:
    """T_G(P, Q) = {g in G : g P g^-1 <= Q}, sorted."""
    G = _as_sub(G)
    if P.order > Q.order:
        return []
    return [g for g in G.sorted if conjugates_into(g, P, Q)]


def normalizer(G, P: Subgroup) -> Subgroup:
    G = _as_sub(G)
    return generate(G.group, [g for g in G.sorted if conjugates_into(g, P, P)])


def centralizer(G, P: Subgroup) -> Subgroup:
    G = _as_sub(G)
    grp = G.group
    t = grp.table
    keep = [g for g in G.sorted if all(t[g, x] == t[x, g] for x in P.gens)]
    return generate(grp, keep)


def center(P: Subgroup) -> Subgroup:
    return centralizer(P, P)


def is_normal(G, N: Subgroup) -> bool:
    G = _as_sub(G)
    return N <= G and all(conjugates_into(g, N, N) for g in G.gens)


def normal_closure(G, X: Iterable[int]) -> Subgroup:
    G = _as_sub(G)
    grp = G.group
    H = generate(grp, X)
    while True:
        extra = [grp.conj(g, x) for g in G.gens for x in H.gens]
        new = [y for y in extra if y not in H.elements]
        if not new:
            return H
        H = generate(grp, list(H.gens) + new)


def core(G, H: Subgroup) -> Subgroup:
    """Largest normal subgroup of G inside H."""
    G = _as_sub(G)
    elems = set(H.elements)
    for g in G.sorted:
        elems &= conjugate(H, g).elements
    return generate(G.group, elems)


def left_cosets(G, H: Subgroup) -> list[tuple[int, ...]]:
    """Left cosets gH as sorted tuples, ordered by their minimal element."""
    G = _as_sub(G)
    t = G.group.table
    seen, out = set(), []
    for g in G.sorted:
        if g in seen:
            continue
        c = tuple(sorted(int(t[g, h]) for h in H.elements))
        seen.update(c)
        out.append(c)
    return out


def right_cosets(G, H: Subgroup) -> list[tuple[int, ...]]:
    """Right cosets Hg, ordered by their minimal element."""
    G = _as_sub(G)
    t = G.group.table
    seen, out = set(), []
    for g in G.sorted:
        if g in seen:
            continue
        c = tuple(sorted(int(t[h, g]) for h in H.elements))
        seen.update(c)
        out.append(c)
    return out


def is_p_group(P, p: int) -> bool:
    return is_p_power(_as_sub(P).order, p)


def p_elements(G, p: int) -> list[int]:
    G = _as_sub(G)
    o = G.group.orders
    return [g for g in G.sorted if is_p_power(int(o[g]), p)]


def p_prime_elements(G, p: int) -> list[int]:
    G = _as_sub(G)
    o = G.group.orders
    return [g for g in G.sorted if o[g] % p != 0]


# -- Sylow theory and subgroup lattices -----------------------------------


def sylow_subgroup(G, p: int) -> Subgroup:
    """A Sylow p-subgroup, grown one step at a time from the trivial group.

    At every step the smallest admissible element (canonical order) is
    taken, so the result is deterministic.
    """
    G = _as_sub(G)
    target = p_part(G.order, p)
    P = trivial_subgroup(G)
    orders = G.group.orders
    while P.order < target:
        N = normalizer(G, P)
        for g in N.sorted:
            if g in P.elements or not is_p_power(int(orders[g]), p):
                continue
            Q = generate(G.group, list(P.gens) + [g])
            if is_p_power(Q.order, p):
                P = Q
                break
        else:  # pragma: no cover - Sylow theory guarantees progress
            raise RuntimeError("Sylow search stalled")
    return P


def sylow_subgroups(G, p: int) -> list[Subgroup]:
    """All Sylow p-subgroups (conjugates of one), canonically ordered."""
    G = _as_sub(G)
    S = sylow_subgroup(G, p)
    return sorted(conjugacy_orbit(G, S), key=lambda H: H.key)


def conjugacy_orbit(G, P: Subgroup) -> list[Subgroup]:
    G = _as_sub(G)
    seen = {P.elements: P}
    queue = deque([P])
    while queue:
        H = queue.popleft()
        for g in G.gens:
            K = conjugate(H, g)
            if K.elements not in seen:
                seen[K.elements] = K
                queue.append(K)
    return list(seen.values())


def cyclic_subgroups(P) -> list[Subgroup]:
    P = _as_sub(P)
    seen = {}
    for x in P.sorted:
        C = generate(P.group, [x])
        seen.setdefault(C.elements, C)
    return sorted(seen.values(), key=lambda H: H.key)


def all_subgroups(S, p: int | None = None, cap: int = SUBGROUP_CAP) -> list[Subgroup]:
    """Every subgroup of the p-group S, sorted by (order, element list).

    Every nontrivial subgroup of a p-group is the join of a maximal subgroup
    with one more cyclic subgroup, so closing under joins with cyclic
    subgroups reaches the whole lattice.
    """
    S = _as_sub(S)
    if p is None:
        primes = _prime_factors(S.order)
        if len(primes) > 1:
            raise NotAPGroup(f"order {S.order} is not a prime power")
        p = primes[0] if primes else 2
    if not is_p_power(S.order, p):
        raise NotAPGroup(f"order {S.order} is not a power of {p}")
    cyclics = cyclic_subgroups(S)
    found = {c.elements: c for c in cyclics}
    queue = deque(cyclics)
    while queue:
        H = queue.popleft()
        for C in cyclics:
            if C.elements <= H.elements:
                continue
            J = join(H, C)
            if J.elements not in found:
                found[J.elements] = J
                if len(found) > cap:
                    raise SubgroupCapExceeded(f"more than {cap} subgroups")
                queue.append(J)
    return sorted(found.values(), key=lambda H: H.key)


def subgroup_lattice(G, cap: int = SUBGROUP_CAP) -> list[Subgroup]:
    """Every subgroup of an arbitrary finite group, by join closure of cyclic subgroups."""
    G = _as_sub(G)
    cyclics = cyclic_subgroups(G)
    found = {c.elements: c for c in cyclics}
    queue = deque(cyclics)
    while queue:
        H = queue.popleft()
        for C in cyclics:
            if C.elements <= H.elements:
                continue
            J = join(H, C)
            if J.elements not in found:
                found[J.elements] = J
                if len(found) > cap:
                    raise SubgroupCapExceeded(f"more than {cap} subgroups")
                queue.append(J)
    return sorted(found.values(), key=lambda H: H.key)


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- residual subgroups ---------------------------------------------------


def O_p(G, p: int) -> Subgroup:
    """Largest normal p-subgroup: the intersection of all Sylow p-subgroups."""
    G = _as_sub(G)
    return core(G, sylow_subgroup(G, p))


def O_p_residual(G, p: int) -> Subgroup:
    """O^p(G): generated by the elements of order prime to p."""
    G = _as_sub(G)
    return generate(G.group, p_prime_elements(G, p))


def O_pprime_residual(G, p: int) -> Subgroup:
    """O^{p'}(G): generated by the p-elements."""
    G = _as_sub(G)
    return generate(G.group, p_elements(G, p))


def O_pprime(G, p: int) -> Subgroup:
    """Largest normal p'-subgroup, generated by the p'-elements whose normal
    closure is a p'-group."""
    G = _as_sub(G)
    grp = G.group
    good, checked = [], set()
    for x in p_prime_elements(G, p):
        if x == 0 or x in checked:
            continue
        checked.update(grp.conj(g, x) for g in G.sorted)
        if normal_closure(G, [x]).order % p != 0:
            good.append(x)
    return generate(grp, good)


def residuals(G, p: int) -> dict[str, Subgroup]:
    return {
        "O_p": O_p(G, p),
        "O^p": O_p_residual(G, p),
        "O^p'": O_pprime_residual(G, p),
        "O_p'": O_pprime(G, p),
    }


# -- quotients ------------------------------------------------------------


@dataclass
class Quotient:
    """G/N as a permutation group on the left cosets of N."""

    source: Subgroup
    kernel: Subgroup
    group: PermGroup
    proj: dict  # source element index -> quotient element index
    cosets: list

    def image(self, H: Subgroup) -> Subgroup:
        return generate(self.group, {self.proj[h] for h in H.elements})

    def preimage(self, K: Subgroup) -> Subgroup:
        return generate(self.source.group, [g for g in self.source.sorted if self.proj[g] in K.elements])

    def lift(self, q: int) -> int:
        return min(g for g in self.source.sorted if self.proj[g] == q)


def quotient_group(G, N: Subgroup) -> Quotient:
    G = _as_sub(G)
    if not is_normal(G, N):
        raise NotNormal("quotient requires a normal subgroup")
    grp = G.group
    t = grp.table
    cosets = left_cosets(G, N)
    where = {}
    for k, c in enumerate(cosets):
        for x in c:
            where[x] = k
    reps = [c[0] for c in cosets]

    def action(g):
        return tuple(where[int(t[g, r])] for r in reps)

    Q = PermGroup(len(cosets), [action(g) for g in G.gens])
    proj = {g: Q.index[action(g)] for g in G.sorted}
    return Quotient(G, N, Q, proj, cosets)


# -- p-solvability and strongly p-embedded subgroups ----------------------


def is_p_solvable(G, p: int) -> bool:
    """True iff the upper p-series reaches G."""
    G = _as_sub(G)
    while G.order > 1:
        A = O_pprime(G, p)
        if A.order == 1:
            A = O_p(G, p)
            if A.order == 1:
                return False
        G = quotient_group(G, A).group.full
    return True


def is_strongly_p_embedded(G, H: Subgroup, p: int) -> bool:
    G = _as_sub(G)
    if not H < G or H.order % p != 0:
        return False
    for coset in left_cosets(G, H):
        x = coset[0]
        if x in H.elements:
            continue
        if len(H.elements & conjugate(H, x).elements) % p == 0:
            return False
    return True


def strongly_p_embedded_candidate(G, p: int) -> Subgroup | None:
    """The subgroup generated by N_G(Q), 1 != Q <= T, for a Sylow T.

    G has a strongly p-embedded subgroup iff p divides |G| and this
    subgroup is proper; it is then strongly p-embedded itself.
    """
    G = _as_sub(G)
    if G.order % p != 0:
        return None
    T = sylow_subgroup(G, p)
    gens = set()
    for Q in all_subgroups(T, p):
        if Q.order > 1:
            gens.update(normalizer(G, Q).gens)
    return generate(G.group, gens)


def contains_strongly_p_embedded(G, p: int) -> bool:
    G = _as_sub(G)
    H = strongly_p_embedded_candidate(G, p)
    return H is not None and H < G


def p_subgroup_poset_components(G, p: int) -> int:
    """Connected components of the poset of nontrivial p-subgroups of G.

    Two subgroups of order p lie in one component iff they are joined by a
    chain of Sylow subgroups containing them, so a union-find over the order
    p subgroups of each Sylow decides connectivity.
    """
    G = _as_sub(G)
    if G.order % p != 0:
        return 0
    sylows = sylow_subgroups(G, p)
    parent: dict = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for T in sylows:
        mins = [C.elements for C in cyclic_subgroups(T) if C.order == p]
        for c in mins:
            parent.setdefault(c, c)
        for c in mins[1:]:
            ra, rb = find(mins[0]), find(c)
            if ra != rb:
                parent[rb] = ra
    return len({find(c) for c in parent})


# -- constructions --------------------------------------------------------


@dataclass
class WreathProduct:
    group: PermGroup
    base: Subgroup
    diagonal: Subgroup
    cycle: int
    copies: list  # the p base factors, as subgroups
    p: int
    block: int  # degree of the factor

    def embed(self, i: int, perm: Perm) -> int:
        """Index of the element acting as ``perm`` on block i, trivially elsewhere."""
        d = self.block
        img = list(range(d * self.p))
        for x in range(d):
            img[i * d + x] = i * d + perm[x]
        return self.group.index[tuple(img)]

    def diag(self, perm: Perm) -> int:
        d = self.block
        img = [i * d + perm[x] for i in range(self.p) for x in range(d)]
        return self.group.index[tuple(img)]


def _block_perm(perm: Perm, i: int, d: int, p: int) -> Perm:
    img = list(range(d * p))
    for x in range(d):
        img[i * d + x] = i * d + perm[x]
    return tuple(img)


def wreath_product_cp(G0: PermGroup, p: int, cap: int = ORDER_CAP) -> WreathProduct:
    d = G0.degree
    if G0.order ** p * p > cap:
        raise OrderCapExceeded(f"|G0|^p * p exceeds {cap}")
    cyc = tuple(((x // d + 1) % p) * d + x % d for x in range(d * p))
    gens = [_block_perm(h, 0, d, p) for h in G0.generators] + [cyc]
    if p == 1 or d == 0:
        gens = [_block_perm(h, 0, d, p) for h in G0.generators]
    G = PermGroup(d * p, gens, cap=cap)
    copies = [generate(G, [G.index[_block_perm(h, i, d, p)] for h in G0.generators]) for i in range(p)]
    base = generate(G, [g for C in copies for g in C.gens])
    diag_gens = [G.index[tuple(i * d + h[x] for i in range(p) for x in range(d))] for h in G0.generators]
    diagonal = generate(G, diag_gens)
    return WreathProduct(G, base, diagonal, G.index[cyc], copies, p, d)


def direct_product(G1: PermGroup, G2: PermGroup) -> tuple[PermGroup, Subgroup, Subgroup]:
    d1, d2 = G1.degree, G2.degree
    left = [tuple(h) + tuple(range(d1, d1 + d2)) for h in G1.generators]
    right = [tuple(range(d1)) + tuple(d1 + x for x in h) for h in G2.generators]
    G = PermGroup(d1 + d2, left + right)
    return G, generate(G, [G.index[g] for g in left]), generate(G, [G.index[g] for g in right])
