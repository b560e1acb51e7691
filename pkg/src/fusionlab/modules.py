"""Finite-dimensional F_p[G]-modules.

Matrices act on column vectors.  A module stores one matrix per element of
its group, filled in by a breadth-first walk of the Cayley graph; every edge
of the walk is checked, which is exactly the statement that the assignment
is a homomorphism.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Callable, Iterable

import numpy as np

from . import linalg
from .errors import IncompatibleAction, IndexCapExceeded, InvalidModule, NotASubgroup
from .perm import (
    PermGroup,
    Subgroup,
    O_p_residual,
    _as_sub,
    centralizer,
    closure,
    generate,
    left_cosets,
    right_cosets,
)

INDEX_CAP = 10_000


class GModule:
    def __init__(self, p: int, group, mats: dict):
        self.p = p
        self.group: Subgroup = _as_sub(group)
        self.mats = mats
        self.dim = next(iter(mats.values())).shape[0] if mats else 0

    def __repr__(self):
        return f"GModule(p={self.p}, dim={self.dim}, |G|={self.group.order})"

    # -- construction -----------------------------------------------------

    @classmethod
    def from_generators(cls, p: int, group, gen_mats: Iterable[tuple[int, np.ndarray]], dim: int | None = None):
        """Module from (generator index, matrix) pairs; raises InvalidModule on inconsistency."""
        G = _as_sub(group)
        grp = G.group
        pairs = [(int(g), np.mod(np.asarray(m, dtype=np.int64), p)) for g, m in gen_mats]
        if dim is None:
            dim = pairs[0][1].shape[0] if pairs else 0
        for g, m in pairs:
            if g not in G.elements:
                raise InvalidModule("generator outside the group")
            if m.shape != (dim, dim):
                raise InvalidModule(f"matrix shape {m.shape} does not match dim {dim}")
            if dim and linalg.rank(m, p) < dim:
                raise InvalidModule("action matrix is not invertible mod p")
        gen_set = {g for g, _ in pairs}
        if not G.elements <= closure(grp, gen_set):
            raise InvalidModule("matrices given for a non-generating set")
        ident = np.eye(dim, dtype=np.int64)
        mats = {0: ident}
        queue = deque([0])
        t = grp.table
        while queue:
            x = queue.popleft()
            for g, m in pairs:
                y = int(t[g, x])
                val = np.mod(m @ mats[x], p)
                if y in mats:
                    if not np.array_equal(mats[y], val):
                        raise InvalidModule("generator matrices do not define a homomorphism")
                else:
                    mats[y] = val
                    queue.append(y)
        return cls(p, G, mats)

    @classmethod
    def from_function(cls, p: int, group, func: Callable[[int], np.ndarray]):
        G = _as_sub(group)
        return cls.from_generators(p, G, [(g, func(g)) for g in G.gens], dim=func(0).shape[0])

    @classmethod
    def trivial(cls, p: int, group, dim: int = 1):
        G = _as_sub(group)
        ident = np.eye(dim, dtype=np.int64)
        return cls(p, G, {g: ident for g in G.elements})

    # -- queries ----------------------------------------------------------

    def act(self, g: int) -> np.ndarray:
        return self.mats[g]

    def stack(self, elems: Iterable[int]) -> np.ndarray:
        """Array of shape (len(elems), dim, dim)."""
        elems = list(elems)
        if not elems:
            return np.zeros((0, self.dim, self.dim), dtype=np.int64)
        return np.stack([self.mats[g] for g in elems])

    def is_trivial(self) -> bool:
        ident = np.eye(self.dim, dtype=np.int64)
        return all(np.array_equal(self.mats[g], ident) for g in self.group.gens)

    def kernel(self) -> Subgroup:
        ident = np.eye(self.dim, dtype=np.int64)
        grp = self.group.group
        return generate(grp, [g for g in self.group.sorted if np.array_equal(self.mats[g], ident)])

    def restrict(self, H) -> "GModule":
        return restrict_module(self, H)


def restrict_module(M: GModule, H) -> GModule:
    H = _as_sub(H)
    if not H <= M.group:
        raise NotASubgroup("restriction target is not a subgroup of the module's group")
    return GModule(M.p, H, {h: M.mats[h] for h in H.elements})


def fixed_points(M: GModule, H=None) -> np.ndarray:
    """RREF basis (rows) of the vectors fixed by every element of H."""
    H = M.group if H is None else _as_sub(H)
    ident = np.eye(M.dim, dtype=np.int64)
    blocks = [M.mats[h] - ident for h in H.gens]
    return linalg.kernel_intersection(blocks, M.dim, M.p)


def induce(M: GModule, H, G) -> GModule:
    """F_p[G] (x)_{F_p[H]} M with basis t_i (x) m over left coset reps t_i."""
    H, G = _as_sub(H), _as_sub(G)
    if not H <= G or not H <= M.group:
        raise NotASubgroup("induction needs H <= G and M defined on H")
    grp = G.group
    cosets = left_cosets(G, H)
    if len(cosets) > INDEX_CAP:
        raise IndexCapExceeded(f"index {len(cosets)} exceeds {INDEX_CAP}")
    where = {x: k for k, c in enumerate(cosets) for x in c}
    reps = [c[0] for c in cosets]
    d, n = M.dim, len(reps)

    def matrix(g):
        out = np.zeros((n * d, n * d), dtype=np.int64)
        for i, t in enumerate(reps):
            gt = grp.mul(g, t)
            j = where[gt]
            h = grp.mul(grp.inv(reps[j]), gt)
            out[j * d:(j + 1) * d, i * d:(i + 1) * d] = M.mats[h]
        return out

    return GModule.from_generators(M.p, G, [(g, matrix(g)) for g in G.gens], dim=n * d)


def coinduce(M: GModule, H, G) -> GModule:
    """Hom_{F_p[H]}(F_p[G], M), f determined by its values on right coset reps."""
    H, G = _as_sub(H), _as_sub(G)
    if not H <= G or not H <= M.group:
        raise NotASubgroup("coinduction needs H <= G and M defined on H")
    grp = G.group
    cosets = right_cosets(G, H)
    if len(cosets) > INDEX_CAP:
        raise IndexCapExceeded(f"index {len(cosets)} exceeds {INDEX_CAP}")
    where = {x: k for k, c in enumerate(cosets) for x in c}
    reps = [c[0] for c in cosets]
    d, n = M.dim, len(reps)

    def matrix(g):
        out = np.zeros((n * d, n * d), dtype=np.int64)
        for j, s in enumerate(reps):
            sg = grp.mul(s, g)
            k = where[sg]
            h = grp.mul(sg, grp.inv(reps[k]))
            out[j * d:(j + 1) * d, k * d:(k + 1) * d] = M.mats[h]
        return out

    return GModule.from_generators(M.p, G, [(g, matrix(g)) for g in G.gens], dim=n * d)


# -- intertwiners ---------------------------------------------------------


def hom_space(A: GModule, B: GModule) -> np.ndarray:
    """Basis of Hom_G(A, B); each row is a row-major flattened dim(B) x dim(A) matrix."""
    p = A.p
    G = A.group
    dA, dB = A.dim, B.dim
    if dA * dB == 0:
        return np.zeros((0, dA * dB), dtype=np.int64)
    IA, IB = np.eye(dA, dtype=np.int64), np.eye(dB, dtype=np.int64)
    blocks = [np.kron(IB, A.mats[g].T) - np.kron(B.mats[g], IA) for g in G.gens]
    return linalg.kernel_intersection(blocks, dA * dB, p)


def find_isomorphism(A: GModule, B: GModule, search_cap: int = 4096, seed: int = 0) -> np.ndarray | None:
    """An invertible G-map A -> B, or None.  Exhaustive when p^dim Hom is small."""
    if A.dim != B.dim:
        return None
    p, d = A.p, A.dim
    if d == 0:
        return np.zeros((0, 0), dtype=np.int64)
    basis = hom_space(A, B)
    k = basis.shape[0]
    if k == 0:
        return None
    if p ** k <= search_cap:
        combos = itertools.product(range(p), repeat=k)
    else:
        rng = np.random.default_rng(seed)
        combos = (rng.integers(0, p, size=k) for _ in range(search_cap))
    for c in combos:
        X = np.mod(np.asarray(c, dtype=np.int64) @ basis, p).reshape(d, d)
        if linalg.is_invertible(X, p):
            return X
    return None


def is_isomorphic(A: GModule, B: GModule) -> bool:
    return find_isomorphism(A, B) is not None


# -- compatibility with the linking-system quotient ------------------------


def check_pilocal_compatibility(M: GModule, G, collection: Iterable[Subgroup]):
    """Check that O^p(C_G(P)) acts trivially on M for every P in the collection.

    Returns ``(True, None)`` or ``(False, (P, g))`` with g the first
    offending element in canonical order.
    """
    G = _as_sub(G)
    ident = np.eye(M.dim, dtype=np.int64)
    for P in collection:
        O = O_p_residual(centralizer(G, P), M.p)
        if all(np.array_equal(M.mats[g], ident) for g in O.gens):
            continue
        for g in O.sorted:
            if not np.array_equal(M.mats[g], ident):
                return False, (P, g)
    return True, None


def require_compatible(M: GModule, G, collection) -> None:
    ok, witness = check_pilocal_compatibility(M, G, collection)
    if not ok:
        raise IncompatibleAction("module action does not factor through the linking system", witness)
