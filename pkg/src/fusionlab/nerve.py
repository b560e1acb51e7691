"""Transporter and linking categories over a collection of subgroups of S,
their nerves, and nerve cohomology with coefficients in a G-module.

A morphism P -> Q is stored as (source, target, label).  In a transporter
category the label is an element g with g P g^-1 <= Q; in a linking category
it is the least element of the coset g O^p(C_G(P)).  Composition is the
product of labels: (h : Q -> R) o (g : P -> Q) = hg.

A normalized k-chain is a string (f_1, ..., f_k) of non-identity morphisms
with f_i : P_i -> P_{i-1}.  A cochain assigns to each chain a vector of M
(thought of as sitting at P_0), and the coboundary is

    (df)(f_1..f_{k+1}) = f_1 . f(f_2..f_{k+1})
                         + sum_i (-1)^i f(.., f_i o f_{i+1}, ..)
                         + (-1)^{k+1} f(f_1..f_k),

where a face whose composite is an identity is degenerate and contributes
nothing.  With one object this is the normalized bar complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from . import linalg
from .cohom import (
    CohomologyBasis,
    CohomologyEngine,
    bar_chain_images,
    cell_cap,
    cohomology_from_cocycles,
)
from .errors import CellCapExceeded, IncompatibleAction, InvalidCollection
from .fusion import FusionData, build_fusion
from .modules import GModule, check_pilocal_compatibility
from .perm import O_p, O_p_residual, Subgroup, _as_sub, centralizer, transporter

_CODE_LIMIT = 2 ** 62


# -- collections ----------------------------------------------------------


def collection_members(F: FusionData, collection) -> list:
    """Subgroups of S in a named collection, in the order of F.subgroups."""
    if not isinstance(collection, str):
        wanted = {_as_sub(P).elements for P in collection}
        members = [P for P in F.subgroups if P.elements in wanted]
        if len(members) != len(wanted):
            raise InvalidCollection("collection contains a subgroup that is not a subgroup of S")
        validate_collection(F, members)
        return members
    if collection == "centric":
        return list(F.centric_subgroups)
    if collection == "quasicentric":
        return [P for P in F.subgroups if F.info(P).quasicentric]
    if collection == "cr":
        cr = [P for P in F.subgroups if F.info(P).centric and F.info(P).radical]
        return [P for P in F.subgroups if any(Q.elements <= P.elements for Q in cr)]
    if collection == "constrained":
        Q = O_p(F.G, F.p)
        return [P for P in F.subgroups if Q.elements <= P.elements]
    if collection == "all":
        return list(F.subgroups)
    raise ValueError(f"unknown collection {collection!r}")


def validate_collection(F: FusionData, members: list) -> None:
    """Raise InvalidCollection unless members is closed under F-conjugacy and overgroups in S."""
    have = {P.elements for P in members}
    for P in members:
        for m in F.info(P).members:
            if F.subgroups[m].elements not in have:
                raise InvalidCollection(f"not closed under conjugacy: {F.subgroups[m]!r} missing")
        for Q in F.subgroups:
            if P.elements <= Q.elements and Q.elements not in have:
                raise InvalidCollection(f"not closed under overgroups: {Q!r} missing")


# -- finite categories ----------------------------------------------------


@dataclass
class FiniteCategory:
    G: Subgroup
    p: int
    kind: str  # "transporter" or "linking"
    objects: list
    src: np.ndarray
    tgt: np.ndarray
    label: np.ndarray
    kernels: list  # per object: the subgroup labels are taken modulo
    canon: np.ndarray | None = field(default=None, repr=False)  # (objects, |G|) least coset element

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.label)

    @cached_property
    def codes(self) -> np.ndarray:
        return self._code(self.src, self.tgt, self.label)

    def _code(self, s, t, lab):
        N = len(self.G.group)
        return (np.asarray(s, np.int64) * self.n_objects + t) * N + lab

    @cached_property
    def is_identity(self) -> np.ndarray:
        return (self.src == self.tgt) & (self.label == 0)

    def object_index(self, P) -> int:
        P = _as_sub(P)
        for i, Q in enumerate(self.objects):
            if Q.elements == P.elements:
                return i
        raise KeyError(f"{P!r} is not an object")

    def hom(self, i: int, j: int) -> np.ndarray:
        lo, hi = np.searchsorted(self.codes, [self._code(i, j, 0), self._code(i, j + 1, 0)])
        return np.arange(lo, hi)

    def find(self, s, t, lab) -> np.ndarray:
        """Morphism indices for (source, target, canonical label) arrays."""
        codes = self._code(s, t, lab)
        pos = np.searchsorted(self.codes, codes)
        if np.any(pos >= len(self.codes)) or np.any(self.codes[np.minimum(pos, len(self.codes) - 1)] != codes):
            raise KeyError("morphism not in the category")
        return pos

    def canonical(self, obj, g) -> np.ndarray:
        g = np.asarray(g, dtype=np.int64)
        if self.canon is None:
            return g
        return self.canon[obj, g]

    def compose(self, a, b) -> np.ndarray:
        """Indices of a o b for arrays of composable morphisms (tgt(b) = src(a))."""
        a, b = np.asarray(a), np.asarray(b)
        table = self.G.group.table
        s = self.src[b]
        lab = self.canonical(s, table[self.label[a], self.label[b]])
        return self.find(s, self.tgt[a], lab)

    def composition_table(self) -> np.ndarray:
        """Dense table comp[a, b] = a o b, or -1 if not composable."""
        n = self.n_morphisms
        out = np.full((n, n), -1, dtype=np.int64)
        for a in range(n):
            b = np.flatnonzero(self.tgt == self.src[a])
            if b.size:
                out[a, b] = self.compose(np.full(b.size, a), b)
        return out

    def module_action(self, M: GModule) -> np.ndarray:
        return M.stack(self.label.tolist())


def _build(F: FusionData, collection, kind: str) -> FiniteCategory:
    members = collection_members(F, collection)
    grp = F.G.group
    N = len(grp)
    nobj = len(members)
    if kind == "linking":
        kernels = [O_p_residual(centralizer(F.G, P), F.p) for P in members]
        canon = np.empty((nobj, N), dtype=np.int64)
        table = grp.table
        for i, K in enumerate(kernels):
            ks = np.array(K.sorted, dtype=np.int64)
            # least element of g K
            canon[i] = table[:, ks].min(axis=1)
    else:
        kernels = [_as_sub(grp.subgroup([])) for _ in members]
        canon = None
    src, tgt, lab = [], [], []
    for i, P in enumerate(members):
        for j, Q in enumerate(members):
            T = transporter(F.G, P, Q)
            if not T:
                continue
            labels = np.unique(canon[i, T]) if canon is not None else np.array(T, dtype=np.int64)
            src.append(np.full(len(labels), i))
            tgt.append(np.full(len(labels), j))
            lab.append(labels)
    cat = FiniteCategory(
        F.G, F.p, kind, members,
        np.concatenate(src).astype(np.int64), np.concatenate(tgt).astype(np.int64),
        np.concatenate(lab).astype(np.int64), kernels, canon)
    order = np.argsort(cat._code(cat.src, cat.tgt, cat.label), kind="stable")
    cat.src, cat.tgt, cat.label = cat.src[order], cat.tgt[order], cat.label[order]
    return cat


def build_transporter(G, p: int, collection="centric", F: FusionData | None = None) -> FiniteCategory:
    F = F or build_fusion(G, p)
    return _build(F, collection, "transporter")


def build_linking(G, p: int, collection="centric", F: FusionData | None = None) -> FiniteCategory:
    F = F or build_fusion(G, p)
    return _build(F, collection, "linking")


def one_object_category(G, p: int) -> FiniteCategory:
    """The category with one object and morphisms the elements of G."""
    G = _as_sub(G)
    labels = np.array(G.sorted, dtype=np.int64)
    z = np.zeros(len(labels), dtype=np.int64)
    return FiniteCategory(G, p, "transporter", [G], z, z.copy(), labels, [_as_sub(G.group.subgroup([]))])


def delta_labels(T: FiniteCategory, L: FiniteCategory) -> np.ndarray:
    """The quotient functor T -> L on morphism indices (same objects)."""
    if [P.elements for P in T.objects] != [P.elements for P in L.objects]:
        raise ValueError("categories have different objects")
    return L.find(T.src, T.tgt, L.canonical(T.src, T.label))


# -- nerve chains ---------------------------------------------------------


def chain_census(C: FiniteCategory, n_max: int) -> dict:
    """Number of normalized k-chains for k = 0..n_max."""
    A = np.zeros((C.n_objects, C.n_objects), dtype=object)
    nonid = ~C.is_identity
    for s, t in zip(C.src[nonid], C.tgt[nonid]):
        A[t, s] += 1
    out = {0: C.n_objects}
    power = np.identity(C.n_objects, dtype=object)
    for k in range(1, n_max + 1):
        power = power.dot(A)
        out[k] = int(power.sum())
    return out


class NerveComplex:
    """Normalized nerve cochains of a finite category with values in M."""

    def __init__(self, C: FiniteCategory, M: GModule, n_max: int, check: bool = True):
        self.C = C
        self.M = M
        self.p = M.p
        self.d = M.dim
        self.n_max = n_max
        if check and C.kind == "linking" and not M.is_trivial():
            ok, witness = check_pilocal_compatibility(M, C.G, C.objects)
            if not ok:
                raise IncompatibleAction("module does not factor through the linking category", witness)
        census = chain_census(C, n_max + 1)
        self.census = census
        nmor = max(C.n_morphisms, 2)
        for k in range(n_max + 1):
            cells = (k + 3) * census[k + 1] * max(self.d, 1) ** 2
            if cells > cell_cap() or nmor ** (k + 1) >= _CODE_LIMIT:
                raise CellCapExceeded(f"nerve coboundary in degree {k} needs ~{cells} entries", census=census)
        self.act = C.module_action(M)
        self.nonid = np.flatnonzero(~C.is_identity)
        self._chains = {}
        self._cob = {}

    def chains(self, k: int) -> np.ndarray:
        """Normalized k-chains as rows of morphism indices, lexicographically sorted."""
        if k in self._chains:
            return self._chains[k]
        C = self.C
        if k == 0:
            out = np.zeros((C.n_objects, 0), dtype=np.int64)
        elif k == 1:
            out = self.nonid[:, None].copy()
        else:
            prev = self.chains(k - 1)
            by_tgt = self.nonid[np.argsort(C.tgt[self.nonid], kind="stable")]
            counts = np.bincount(C.tgt[self.nonid], minlength=C.n_objects)
            starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
            obj = C.src[prev[:, -1]]
            reps = counts[obj]
            total = int(reps.sum())
            offsets = np.repeat(np.cumsum(reps) - reps, reps)
            within = np.arange(total) - offsets
            appended = by_tgt[np.repeat(starts[obj], reps) + within]
            out = np.hstack([np.repeat(prev, reps, axis=0), appended[:, None]])
        self._chains[k] = out
        return out

    def _codes(self, rows: np.ndarray) -> np.ndarray:
        base = np.int64(max(self.C.n_morphisms, 1))
        code = np.zeros(rows.shape[0], dtype=np.int64)
        for i in range(rows.shape[1]):
            code = code * base + rows[:, i]
        return code

    def chain_index(self, rows: np.ndarray, k: int) -> np.ndarray:
        """Positions of the given k-chains (k >= 1) in chains(k)."""
        ref = self._codes(self.chains(k))
        return np.searchsorted(ref, self._codes(rows))

    def cochain_dim(self, k: int) -> int:
        return self.chains(k).shape[0] * self.d

    def coboundary(self, k: int) -> sp.csr_matrix:
        """d^k : C^k -> C^{k+1}."""
        if k in self._cob:
            return self._cob[k]
        C, d, p = self.C, self.d, self.p
        X = self.chains(k + 1)
        rows = np.arange(X.shape[0])
        R, Cc, V = [], [], []
        # face 0, twisted by the first morphism
        col = self.chain_index(X[:, 1:], k) if k else C.src[X[:, 0]]
        acts = self.act[X[:, 0]]
        for a in range(d):
            for b in range(d):
                vals = acts[:, a, b]
                keep = vals != 0
                R.append(rows[keep] * d + a)
                Cc.append(col[keep] * d + b)
                V.append(vals[keep])
        for i in range(1, k + 1):
            merged = C.compose(X[:, i - 1], X[:, i])
            keep = ~C.is_identity[merged]
            Y = np.hstack([X[keep, :i - 1], merged[keep, None], X[keep, i + 1:]])
            col = self.chain_index(Y, k)
            for a in range(d):
                R.append(rows[keep] * d + a)
                Cc.append(col * d + a)
                V.append(np.full(col.size, (-1) ** i % p, dtype=np.int64))
        col = self.chain_index(X[:, :k], k) if k else C.tgt[X[:, 0]]
        for a in range(d):
            R.append(rows * d + a)
            Cc.append(col * d + a)
            V.append(np.full(rows.size, (-1) ** (k + 1) % p, dtype=np.int64))
        mat = sp.csr_matrix(
            (np.concatenate(V), (np.concatenate(R), np.concatenate(Cc))),
            shape=(X.shape[0] * d, self.cochain_dim(k)), dtype=np.int64)
        mat.data %= p
        mat.eliminate_zeros()
        self._cob[k] = mat
        return mat

    @cached_property
    def bases(self) -> list:
        out = []
        for n in range(self.n_max + 1):
            Z = linalg.sparse_kernel(self.coboundary(n), self.p)
            if n == 0:
                B = np.zeros((0, self.cochain_dim(0)), np.int64)
            else:
                B = np.mod(self.coboundary(n - 1).T.toarray(), self.p)
            out.append(cohomology_from_cocycles(n, self.p, self.cochain_dim(n), Z, B))
        return out


def nerve_cohomology(C: FiniteCategory, M: GModule, n_max: int) -> list:
    return NerveComplex(C, M, n_max).bases


# -- comparison maps ------------------------------------------------------


def delta_S_comparison(nerve: NerveComplex, engine: CohomologyEngine, n: int, S=None) -> np.ndarray:
    """H^n(|C|, M) -> H^n(S, M) induced by the inclusion of the one-object
    category of S at the object S; a (dim H^n(S), dim H^n(|C|)) matrix in the
    canonical bases of the nerve and of ``engine``.
    """
    C, p, d = nerve.C, nerve.p, nerve.d
    S = _as_sub(S) if S is not None else max(C.objects, key=lambda P: P.order)
    s = C.object_index(S)
    Hn = nerve.bases[n]
    HS = engine.basis(S, n)
    if Hn.dim == 0 or HS.dim == 0:
        return np.zeros((HS.dim, Hn.dim), dtype=np.int64)
    images = bar_chain_images(engine, S, n)
    mor = {int(lab): int(m) for m, lab in zip(C.hom(s, s), C.label[C.hom(s, s)])}
    cols, gens, coeff = [], [], []
    for i, elt in enumerate(images):
        for (h, tup), a in elt.items():
            if n == 0:
                cols.append(s)
            else:
                # canonical label of each element under the quotient, then the chain
                chain = np.array([[mor[int(C.canonical(s, x))] for x in tup]], dtype=np.int64)
                cols.append(int(nerve.chain_index(chain, n)[0]))
            gens.append(i)
            coeff.append(a * engine.M.mats[h])
    out = np.zeros((len(images) * d, nerve.cochain_dim(n)), dtype=np.int64)
    for i, c, blk in zip(gens, cols, coeff):
        out[i * d:(i + 1) * d, c * d:(c + 1) * d] += blk
    res_cocycles = linalg.matmul_mod(Hn.reps, np.mod(out, p).T, p)
    return HS.coords(res_cocycles)


def homofunctor_map(T_nerve: NerveComplex, L_nerve: NerveComplex, n: int) -> np.ndarray:
    """H^n(|L|, M) -> H^n(|T|, M) induced by the quotient functor T -> L."""
    T, L = T_nerve.C, L_nerve.C
    HL, HT = L_nerve.bases[n], T_nerve.bases[n]
    if HL.dim == 0 or HT.dim == 0:
        return np.zeros((HT.dim, HL.dim), dtype=np.int64)
    d, p = T_nerve.d, T_nerve.p
    if n == 0:
        idx = np.arange(T.n_objects)
        keep = np.ones(T.n_objects, dtype=bool)
    else:
        lab = delta_labels(T, L)
        X = T_nerve.chains(n)
        Y = lab[X]
        keep = ~np.any(L.is_identity[Y], axis=1)
        idx = L_nerve.chain_index(Y[keep], n)
    rows = np.flatnonzero(keep)
    # pullback: (f o delta)(chain) = f(delta(chain)); degenerate images give 0
    pulled = np.zeros((HL.dim, T_nerve.cochain_dim(n)), dtype=np.int64)
    for a in range(d):
        pulled[:, rows * d + a] = HL.reps[:, idx * d + a]
    return HT.coords(pulled)


def nerve_dims(C: FiniteCategory, M: GModule, n_max: int) -> list:
    return [b.dim for b in nerve_cohomology(C, M, n_max)]
