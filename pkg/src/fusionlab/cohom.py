"""Group cohomology with twisted F_p coefficients.

Two independent routes are provided:

* :func:`bar_cohomology` builds the normalized (inhomogeneous) bar complex
  directly.  It is only feasible for very small groups but needs no choices.
* :class:`FreeResolution` builds a free F_p[G]-resolution of the trivial
  module by repeated kernel computations and module-generator selection.
  Cochains are then ``Hom_G(P_k, M) = M^{r_k}``, which stays small even for
  groups of order several hundred.

Maps between cohomology groups of different subgroups (restriction and the
twisted conjugation maps ``kappa_g``) are induced by chain maps lifted along
group monomorphisms.  Every linear map on cohomology is returned as a matrix
of shape ``(dim target, dim source)`` in canonical bases.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from . import linalg
from .errors import CellCapExceeded, IncompatibleAction
from .modules import GModule, check_pilocal_compatibility
from .perm import Subgroup, _as_sub

DEFAULT_CELL_CAP = 5_000_000


def cell_cap() -> int:
    return int(os.environ.get("FUSIONLAB_CELL_CAP", DEFAULT_CELL_CAP))


# -- canonical cohomology bases -------------------------------------------


@dataclass
class CohomologyBasis:
    """H^n = Z^n / B^n with canonical representatives.

    ``reps`` are cocycles (rows) reduced against the coboundary echelon form,
    themselves in reduced row-echelon form; a cocycle's coordinates are read
    off at the pivot columns of ``reps`` after reduction modulo B^n.
    """

    degree: int
    p: int
    cochain_dim: int
    reps: np.ndarray
    rep_pivots: list
    bnd: np.ndarray
    bnd_pivots: list

    @property
    def dim(self) -> int:
        return self.reps.shape[0]

    def coords(self, cocycles: np.ndarray) -> np.ndarray:
        """Coordinates (columns) of cocycles given as rows."""
        cocycles = np.atleast_2d(np.asarray(cocycles, dtype=np.int64))
        red = linalg.reduce_rows(cocycles, self.bnd, self.bnd_pivots, self.p)
        if self.dim == 0:
            return np.zeros((0, cocycles.shape[0]), dtype=np.int64)
        return red[:, self.rep_pivots].T.copy()


def cohomology_from_cocycles(degree: int, p: int, n: int, Z: np.ndarray, B: np.ndarray) -> CohomologyBasis:
    """Build the canonical basis from a cocycle basis Z and a spanning set B of coboundaries."""
    if n == 0:
        empty = np.zeros((0, 0), np.int64)
        return CohomologyBasis(degree, p, 0, empty, [], empty, [])
    Bm, Bp = linalg.rref(B.reshape(-1, n), p) if B.size else (np.zeros((0, n), np.int64), [])
    Zr = linalg.reduce_rows(Z.reshape(-1, n), Bm, Bp, p)
    Hm, Hp = linalg.rref(Zr, p) if Zr.size else (np.zeros((0, n), np.int64), [])
    return CohomologyBasis(degree, p, n, Hm, Hp, Bm, Bp)


# -- normalized bar complex -----------------------------------------------


class BarComplex:
    """Normalized bar cochains C^n = maps from (G - 1)^n to M."""

    def __init__(self, G, M: GModule, n_max: int):
        self.G = _as_sub(G)
        self.M = M
        self.p = M.p
        self.d = M.dim
        self.n_max = n_max
        grp = self.G.group
        self.nonid = [g for g in self.G.sorted if g != 0]
        self.m = len(self.nonid)
        self.local = {g: k for k, g in enumerate(self.nonid)}
        m = self.m
        # product table on local indices; -1 marks the identity
        prod = np.full((m, m), -1, dtype=np.int64)
        for a, ga in enumerate(self.nonid):
            for b, gb in enumerate(self.nonid):
                c = grp.mul(ga, gb)
                if c != 0:
                    prod[a, b] = self.local[c]
        self.prod = prod
        self.act = M.stack(self.nonid)
        for n in range(n_max + 1):
            nnz = (n + 2) * m ** (n + 1) * max(self.d, 1) ** 2
            if nnz > cell_cap():
                raise CellCapExceeded(
                    f"bar coboundary in degree {n} needs ~{nnz} entries", census=self.census())
        self._cob = {}

    def census(self) -> dict:
        return {n: self.m ** n for n in range(self.n_max + 2)}

    def cochain_dim(self, n: int) -> int:
        return self.m ** n * self.d

    def coboundary(self, n: int) -> sp.csr_matrix:
        """delta^n : C^n -> C^{n+1} as a sparse matrix."""
        if n in self._cob:
            return self._cob[n]
        m, d, p = self.m, self.d, self.p
        rows_n1 = m ** (n + 1)
        tuples = np.indices((m,) * (n + 1)).reshape(n + 1, -1) if n + 1 > 0 else np.zeros((0, 1), np.int64)
        radix = m ** np.arange(n - 1, -1, -1, dtype=np.int64) if n > 0 else np.zeros(0, np.int64)
        row_ids = np.arange(rows_n1)
        R, C, V = [], [], []
        # face 0: g1 . f(g2, ..., g_{n+1})
        col = tuples[1:].T @ radix if n > 0 else np.zeros(rows_n1, np.int64)
        g1 = tuples[0]
        for a in range(d):
            for b in range(d):
                vals = self.act[g1, a, b]
                keep = vals != 0
                R.append(row_ids[keep] * d + a)
                C.append(col[keep] * d + b)
                V.append(vals[keep])
        # inner faces
        for i in range(1, n + 1):
            merged = self.prod[tuples[i - 1], tuples[i]]
            keep = merged >= 0
            parts = np.vstack([tuples[:i - 1], merged[None, :], tuples[i + 1:]])
            col = parts.T @ radix
            sign = (-1) ** i % p
            for a in range(d):
                R.append(row_ids[keep] * d + a)
                C.append(col[keep] * d + a)
                V.append(np.full(keep.sum(), sign, dtype=np.int64))
        # last face
        col = tuples[:n].T @ radix if n > 0 else np.zeros(rows_n1, np.int64)
        sign = (-1) ** (n + 1) % p
        for a in range(d):
            R.append(row_ids * d + a)
            C.append(col * d + a)
            V.append(np.full(rows_n1, sign, dtype=np.int64))
        mat = sp.csr_matrix(
            (np.concatenate(V), (np.concatenate(R), np.concatenate(C))),
            shape=(rows_n1 * d, m ** n * d), dtype=np.int64)
        mat.data %= p
        mat.eliminate_zeros()
        self._cob[n] = mat
        return mat

    @cached_property
    def bases(self) -> list:
        out = []
        prev = None
        for n in range(self.n_max + 1):
            Z = linalg.sparse_kernel(self.coboundary(n), self.p)
            if n == 0:
                B = np.zeros((0, self.cochain_dim(0)), np.int64)
            else:
                B = np.mod(self.coboundary(n - 1).T.toarray(), self.p)
            out.append(cohomology_from_cocycles(n, self.p, self.cochain_dim(n), Z, B))
        return out

    def tuple_index(self, tup) -> int:
        """Local index of a tuple of ambient elements (all non-identity)."""
        k = 0
        for g in tup:
            k = k * self.m + self.local[g]
        return k


def bar_cohomology(P, M: GModule, n_max: int) -> list:
    return BarComplex(P, M, n_max).bases


# -- free resolutions -----------------------------------------------------


class FreeResolution:
    """Free resolution of F_p over F_p[G], up to a given length.

    ``P_k = F_p[G]^{r_k}``; an element is an array of shape ``(r_k, |G|)``
    indexed by (generator, local element position).  ``bound[k]`` lists
    ``d(e_j)`` for the generators of ``P_k`` (k >= 1).
    """

    def __init__(self, G, p: int, length: int, seed: int = 0):
        self.G = _as_sub(G)
        self.p = p
        self.length = length
        grp = self.G.group
        self.elems = list(self.G.sorted)
        self.n = len(self.elems)
        self.pos = {g: k for k, g in enumerate(self.elems)}
        t = grp.table
        idx = np.array(self.elems, dtype=np.int64)
        # left[x_local, k] = position of x * elems[k]
        self.left = np.array([[self.pos[int(t[x, y])] for y in idx] for x in idx], dtype=np.int64)
        self.ranks = [1]
        self.bound: list = [None]
        self._mats: dict = {}
        rng = np.random.default_rng(seed)
        n = self.n
        if length >= 1:
            gens = []
            for g in self.G.gens:
                v = np.zeros((1, n), dtype=np.int64)
                v[0, self.pos[g]] = 1
                v[0, 0] = (v[0, 0] - 1) % p
                gens.append(v)
            self.ranks.append(len(gens))
            self.bound.append(gens)
        for k in range(2, length + 1):
            D = self.matrix(k - 1)
            R, piv = linalg.rref(D, p)
            Z = linalg.kernel_from_rref(R, piv, D.shape[1], p)
            gens = self._module_generators(Z, self.ranks[k - 1], rng)
            self.ranks.append(len(gens))
            self.bound.append(gens)

    def act(self, x_local: int, v: np.ndarray) -> np.ndarray:
        out = np.empty_like(v)
        out[:, self.left[x_local]] = v
        return out

    def orbit_matrix(self, v: np.ndarray) -> np.ndarray:
        """Rows x.v (flattened) for every x in G."""
        r = v.shape[0]
        out = np.zeros((self.n, r, self.n), dtype=np.int64)
        out[:, :, :] = 0
        rows = np.arange(self.n)[:, None]
        for j in range(r):
            out[rows, j, self.left] = v[j][None, :]
        return out.reshape(self.n, r * self.n)

    def _module_generators(self, Z: np.ndarray, r: int, rng) -> list:
        """Module generators of the submodule with F_p-basis Z.

        Random elements generate large cyclic submodules, so they are tried
        first; basis vectors finish the job deterministically.
        """
        p, n = self.p, self.n
        target = Z.shape[0]
        if target == 0:
            return []
        W = np.zeros((0, r * n), dtype=np.int64)
        piv: list = []
        gens = []
        tries = 0
        while W.shape[0] < target:
            if tries < 4 * target:
                v = np.mod(rng.integers(0, p, size=target) @ Z, p)
            else:
                v = Z[(tries - 4 * target) % target]
            tries += 1
            if not np.any(linalg.reduce_rows(v[None, :], W, piv, p)):
                continue
            gens.append(v.reshape(r, n))
            W, piv = linalg.extend_rref(W, piv, self.orbit_matrix(v.reshape(r, n)), p)
        return gens

    def matrix(self, k: int) -> np.ndarray:
        """F_p matrix of d_k : P_k -> P_{k-1}; columns indexed by (generator, element)."""
        if k in self._mats:
            return self._mats[k]
        rk, rk1, n = self.ranks[k], self.ranks[k - 1], self.n
        D = np.zeros((rk1 * n, rk * n), dtype=np.int64)
        for j, v in enumerate(self.bound[k]):
            D[:, j * n:(j + 1) * n] = self.orbit_matrix(v).T
        self._mats[k] = D
        return D


def _apply_linear(source_vec: np.ndarray, gen_images: list, act_target, mapping: np.ndarray, shape) -> np.ndarray:
    """sum_{j,x} v[j,x] * c(x) . gen_images[j] in the target resolution."""
    out = np.zeros(shape, dtype=np.int64)
    for j in range(source_vec.shape[0]):
        nz = np.flatnonzero(source_vec[j])
        img = gen_images[j]
        for x in nz:
            out += source_vec[j, x] * act_target(int(mapping[x]), img)
    return out


# -- cohomology of a module over many subgroups ---------------------------


@dataclass
class _GroupData:
    G: Subgroup
    res: FreeResolution
    cob: list = field(default_factory=list)
    bases: list = field(default_factory=list)


class CohomologyEngine:
    """Cohomology of one G-module restricted to subgroups, with induced maps.

    Resolutions and canonical bases are cached per subgroup.  ``degree``
    maps are computed for 0 <= n <= n_max.
    """

    def __init__(self, M: GModule, n_max: int, seed: int = 0):
        self.M = M
        self.p = M.p
        self.d = M.dim
        self.n_max = n_max
        self.seed = seed
        self._data: dict = {}
        self._lifts: dict = {}
        self.telemetry = {"resolutions": 0, "lifts": 0}

    # -- per-group data ----------------------------------------------------

    def data(self, P) -> _GroupData:
        P = _as_sub(P)
        key = P.elements
        if key in self._data:
            return self._data[key]
        res = FreeResolution(P, self.p, self.n_max + 1, seed=self.seed)
        self.telemetry["resolutions"] += 1
        gd = _GroupData(P, res)
        acts = self.M.stack(res.elems)  # (n, d, d)
        for k in range(self.n_max + 1):
            gd.cob.append(self._coboundary(res, acts, k))
        for k in range(self.n_max + 1):
            Z = linalg.nullspace(gd.cob[k], self.p)
            if k == 0:
                B = np.zeros((0, res.ranks[0] * self.d), np.int64)
            else:
                B = gd.cob[k - 1].T
            gd.bases.append(cohomology_from_cocycles(k, self.p, res.ranks[k] * self.d, Z, B))
        self._data[key] = gd
        return gd

    def _coboundary(self, res: FreeResolution, acts: np.ndarray, k: int) -> np.ndarray:
        """delta^k : M^{r_k} -> M^{r_{k+1}}, (delta phi)(e_i) = phi(d e_i)."""
        d, p = self.d, self.p
        rk, rk1 = res.ranks[k], res.ranks[k + 1]
        out = np.zeros((rk1 * d, rk * d), dtype=np.int64)
        for i, v in enumerate(res.bound[k + 1]):
            for j in range(rk):
                out[i * d:(i + 1) * d, j * d:(j + 1) * d] = np.tensordot(v[j], acts, axes=(0, 0))
        return np.mod(out, p)

    def basis(self, P, n: int) -> CohomologyBasis:
        return self.data(P).bases[n]

    def dims(self, P) -> list:
        return [b.dim for b in self.data(P).bases]

    def evaluation(self, S, vecs: np.ndarray) -> np.ndarray:
        """Matrix sending phi (values on generators of P_k(S)) to phi(v), for v of shape (r, n)."""
        gd = self.data(S)
        acts = self.M.stack(gd.res.elems)
        d = self.d
        r = vecs.shape[0]
        out = np.zeros((d, r * d), dtype=np.int64)
        for j in range(r):
            out[:, j * d:(j + 1) * d] = np.tensordot(vecs[j], acts, axes=(0, 0))
        return np.mod(out, self.p)

    # -- chain maps --------------------------------------------------------

    def lift(self, P, S, g: int) -> list:
        """Chain map F(P) -> F(S) over x -> g x g^-1 (requires g P g^-1 <= S).

        Returns, per degree k, the images of the generators of P_k as arrays
        of shape (r_k(S), |S|).
        """
        P, S = _as_sub(P), _as_sub(S)
        key = (P.elements, S.elements, g)
        if key in self._lifts:
            return self._lifts[key]
        self.telemetry["lifts"] += 1
        grp = P.group
        rP, rS = self.data(P).res, self.data(S).res
        mapping = np.array([rS.pos[grp.conj(g, x)] for x in rP.elems], dtype=np.int64)
        images = []
        base = np.zeros((1, rS.n), dtype=np.int64)
        base[0, 0] = 1
        images.append([base])
        for k in range(1, self.n_max + 1):
            prev = images[k - 1]
            shape = (rS.ranks[k - 1], rS.n)
            rhs = [
                _apply_linear(v, prev, rS.act, mapping, shape).reshape(-1)
                for v in rP.bound[k]
            ]
            if rhs:
                X = linalg.solve(rS.matrix(k), np.mod(np.array(rhs).T, self.p), self.p)
                images.append([X[:, i].reshape(rS.ranks[k], rS.n) for i in range(len(rhs))])
            else:
                images.append([])
        self._lifts[key] = images
        return images

    def cochain_map(self, P, S, g: int, n: int) -> np.ndarray:
        """Cochain-level kappa_g : C^n(S; M) -> C^n(P; M)."""
        P, S = _as_sub(P), _as_sub(S)
        d, p = self.d, self.p
        images = self.lift(P, S, g)[n]
        twist = linalg.mat_inverse(self.M.mats[g], p) if d else np.zeros((0, 0), np.int64)
        rS = self.data(S).res.ranks[n]
        out = np.zeros((len(images) * d, rS * d), dtype=np.int64)
        for i, v in enumerate(images):
            out[i * d:(i + 1) * d] = twist @ self.evaluation(S, v)
        return np.mod(out, p)

    def kappa(self, g: int, P, S, n: int) -> np.ndarray:
        """kappa_g on H^n(S, M) -> H^n(P, M); matrix (dim H^n(P), dim H^n(S))."""
        HS, HP = self.basis(S, n), self.basis(P, n)
        if HS.dim == 0 or HP.dim == 0:
            return np.zeros((HP.dim, HS.dim), dtype=np.int64)
        C = self.cochain_map(P, S, g, n)
        images = np.mod(HS.reps @ C.T, self.p)
        return HP.coords(images)

    def restriction(self, S, P, n: int) -> np.ndarray:
        return self.kappa(0, P, S, n)


# -- convenience entry points ---------------------------------------------


def group_cohomology(G, M: GModule, n_max: int) -> list:
    """H^0..H^n_max(G, M) via a free resolution."""
    eng = CohomologyEngine(M, n_max)
    return eng.data(G).bases


def restriction_map(S, P, M: GModule, n: int, engine: CohomologyEngine | None = None) -> np.ndarray:
    eng = engine or CohomologyEngine(M, n)
    return eng.restriction(S, P, n)


def kappa_map(g: int, P, S, M: GModule, n: int, G=None, collection=None,
              engine: CohomologyEngine | None = None) -> np.ndarray:
    """kappa_g : H^n(S, M) -> H^n(P, M), refusing incompatible actions.

    Compatibility is checked for ``collection`` (default: just P) inside G
    (default: the module's group).
    """
    G = M.group if G is None else G
    ok, witness = check_pilocal_compatibility(M, G, collection or [P])
    if not ok:
        raise IncompatibleAction("kappa depends on the lift for this module", witness)
    eng = engine or CohomologyEngine(M, n)
    return eng.kappa(g, P, S, n)


# -- bar / resolution comparison ------------------------------------------


def bar_chain_images(engine: CohomologyEngine, S, n: int) -> list:
    """Images of the free generators of P_n in the normalized bar resolution of S.

    Built with the standard contracting homotopy s(g[g1|...|gk]) = [g|g1|...|gk];
    each image is a dict mapping (g, tuple of non-identity elements) to a
    coefficient.
    """
    S = _as_sub(S)
    res = engine.data(S).res
    grp = S.group
    p = engine.p
    images = [[{(0, ()): 1}]]
    for k in range(1, n + 1):
        level = []
        for v in res.bound[k]:
            acc: dict = {}
            for j in range(v.shape[0]):
                for xl in np.flatnonzero(v[j]):
                    x = res.elems[xl]
                    c = int(v[j, xl])
                    for (h, tup), a in images[k - 1][j].items():
                        key = (grp.mul(x, h), tup)
                        acc[key] = (acc.get(key, 0) + c * a) % p
            out: dict = {}
            for (h, tup), a in acc.items():
                if a == 0 or h == 0:
                    continue
                key = (0, (h,) + tup)
                out[key] = (out.get(key, 0) + a) % p
            level.append({k2: a for k2, a in out.items() if a})
        images.append(level)
    return images[n]


def bar_to_resolution(engine: CohomologyEngine, bar: BarComplex, n: int) -> np.ndarray:
    """Cochain map C^n_bar(S; M) -> Hom_S(P_n, M) induced by a chain map
    from the free resolution to the bar resolution.
    """
    p, d = engine.p, engine.d
    images = bar_chain_images(engine, bar.G, n)
    out = np.zeros((len(images) * d, bar.cochain_dim(n)), dtype=np.int64)
    for i, elt in enumerate(images):
        for (h, tup), a in elt.items():
            col = bar.tuple_index(tup)
            out[i * d:(i + 1) * d, col * d:(col + 1) * d] += a * engine.M.mats[h]
    return np.mod(out, p)


def bar_resolution_comparison(engine: CohomologyEngine, bar: BarComplex, n: int) -> np.ndarray:
    """Induced map H^n_bar(S) -> H^n_res(S) in canonical bases."""
    Hb = bar.bases[n]
    Hr = engine.basis(bar.G, n)
    if Hb.dim == 0 or Hr.dim == 0:
        return np.zeros((Hr.dim, Hb.dim), dtype=np.int64)
    C = bar_to_resolution(engine, bar, n)
    return Hr.coords(np.mod(Hb.reps @ C.T, engine.p))
