"""Exact linear algebra over the prime field F_p.

Matrices are numpy ``int64`` arrays with entries in ``[0, p)``.  Dense
elimination is delegated to FLINT's ``nmod_mat`` for odd p; p = 2 uses a
bit-packed elimination on 64-bit words.  The helpers here handle shape edge
cases, canonical (reduced row-echelon) bases and tall sparse coboundary
matrices.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from flint import nmod_mat

from .errors import InconsistentSystem

# Dense fallback threshold for sparse kernels (number of matrix entries).
DENSE_LIMIT = 6_000_000


def _to_flint(A: np.ndarray, p: int) -> nmod_mat:
    m, n = A.shape
    if m == 0 or n == 0:
        return nmod_mat(m, n, [], p)
    rows, cols = np.nonzero(A)
    # per-entry assignment is only cheaper for sparse input
    if 3 * rows.size < m * n:
        M = nmod_mat(m, n, p)
        for i, j, v in zip(rows.tolist(), cols.tolist(), A[rows, cols].tolist()):
            M[i, j] = v
        return M
    return nmod_mat(m, n, np.ascontiguousarray(A, dtype=np.int64).ravel().tolist(), p)


def matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """(A @ B) mod p, through float64 BLAS when the result is exact."""
    k = A.shape[1]
    if k * (p - 1) ** 2 < 2 ** 52:
        out = np.asarray(A, dtype=np.float64) @ np.asarray(B, dtype=np.float64)
        return np.mod(out.astype(np.int64), p)
    return np.mod(np.asarray(A, dtype=object) @ np.asarray(B, dtype=object), p).astype(np.int64)


def _from_flint(M: nmod_mat, rows: int | None = None) -> np.ndarray:
    m, n = M.nrows(), M.ncols()
    if m == 0 or n == 0:
        return np.zeros((m if rows is None else rows, n), dtype=np.int64)
    flat = np.fromiter(map(int, M.entries()), dtype=np.int64, count=m * n)
    out = flat.reshape(m, n)
    return out if rows is None else out[:rows]


def inverse_mod(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def _pack_gf2(A: np.ndarray) -> np.ndarray:
    m, n = A.shape
    words = (n + 63) // 64
    packed = np.zeros((m, words * 8), dtype=np.uint8)
    bits = np.packbits(A.astype(np.uint8), axis=1, bitorder="little")
    packed[:, :bits.shape[1]] = bits
    return packed.view(np.uint64)


def _unpack_gf2(P: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(P.view(np.uint8), axis=1, bitorder="little")[:, :n].astype(np.int64)


def _rref_gf2(A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    m, n = A.shape
    rows = _pack_gf2(A)
    one = np.uint64(1)
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        word, bit = c >> 6, np.uint64(c & 63)
        col = (rows[:, word] >> bit) & one
        nz = np.flatnonzero(col[r:])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            rows[[r, i]] = rows[[i, r]]
            col[[r, i]] = col[[i, r]]
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            # columns left of this word are already zero in the pivot row
            rows[hit, word:] ^= rows[r, word:]
        pivots.append(c)
        r += 1
    return _unpack_gf2(rows[:r], n), pivots


def rref(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form, zero rows dropped; returns (R, pivot columns)."""
    A = np.mod(np.asarray(A, dtype=np.int64), p)
    m, n = A.shape
    if m == 0 or n == 0:
        return np.zeros((0, n), dtype=np.int64), []
    if p == 2:
        return _rref_gf2(A)
    M, r = _to_flint(A, p).rref()
    R = _from_flint(M, rows=r)
    pivots = [int(np.flatnonzero(row)[0]) for row in R]
    return R, pivots


def rank(A: np.ndarray, p: int) -> int:
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    if p == 2:
        return len(_rref_gf2(np.mod(A, 2))[1])
    return _to_flint(np.mod(A, p), p).rank()


def nullspace(A: np.ndarray, p: int) -> np.ndarray:
    """Canonical basis (rows, RREF) of {x : A x = 0}."""
    A = np.mod(np.asarray(A, dtype=np.int64), p)
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if m == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = rref(A, p)
    if len(pivots) == n:
        return np.zeros((0, n), dtype=np.int64)
    return rref(kernel_from_rref(R, pivots, n, p), p)[0]


def reduce_rows(V: np.ndarray, R: np.ndarray, pivots: list[int], p: int) -> np.ndarray:
    """Reduce each row of V modulo the row space of the RREF matrix R."""
    V = np.mod(np.asarray(V, dtype=np.int64), p)
    if len(pivots) == 0 or V.shape[0] == 0:
        return V
    coeff = V[:, pivots]
    return np.mod(V - matmul_mod(coeff, R, p), p)


def kernel_from_rref(R: np.ndarray, pivots: list[int], n: int, p: int) -> np.ndarray:
    """Kernel basis read off an RREF: one row per free column f, e_f - sum R[i, f] e_{pivot_i}.

    The rows are in reduced echelon form with respect to the reversed column
    order, hence canonical for the kernel.
    """
    free = np.setdiff1d(np.arange(n), np.asarray(pivots, dtype=np.int64))
    K = np.zeros((free.size, n), dtype=np.int64)
    K[np.arange(free.size), free] = 1
    if len(pivots):
        K[:, pivots] = np.mod(-R[:, free].T, p)
    return K


def extend_rref(R: np.ndarray, pivots: list[int], V: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """RREF of the row space of [R; V] given R already in RREF."""
    V = reduce_rows(V, R, pivots, p)
    V = V[np.any(V, axis=1)]
    if V.shape[0] == 0:
        return R, list(pivots)
    Rn, pn = rref(V, p)
    if len(pivots):
        R = np.mod(R - matmul_mod(R[:, pn], Rn, p), p)
    allrows = np.vstack([R, Rn])
    allpiv = list(pivots) + pn
    order = np.argsort(allpiv, kind="stable")
    return allrows[order], [allpiv[i] for i in order]


def solve(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """One solution X of A X = B (columns of B are right-hand sides)."""
    A = np.mod(np.asarray(A, dtype=np.int64), p)
    B = np.mod(np.asarray(B, dtype=np.int64), p)
    m, n = A.shape
    k = B.shape[1]
    X = np.zeros((n, k), dtype=np.int64)
    if k == 0 or m == 0:
        if np.any(B):
            raise InconsistentSystem("right-hand side outside the image")
        return X
    R, pivots = rref(np.hstack([A, B]), p)
    for row, c in zip(R, pivots):
        if c >= n:
            raise InconsistentSystem("right-hand side outside the image")
        X[c] = row[n:]
    return X


def kernel_intersection(blocks: list[np.ndarray], ncols: int, p: int) -> np.ndarray:
    """Canonical basis of the common kernel of several matrices with ncols columns."""
    blocks = [np.asarray(b, dtype=np.int64).reshape(-1, ncols) for b in blocks]
    if not blocks:
        return np.eye(ncols, dtype=np.int64)
    return nullspace(np.vstack(blocks), p)


def span_contains(R: np.ndarray, pivots: list[int], V: np.ndarray, p: int) -> bool:
    return not np.any(reduce_rows(V, R, pivots, p))


def is_invertible(A: np.ndarray, p: int) -> bool:
    A = np.asarray(A)
    return A.shape[0] == A.shape[1] and rank(A, p) == A.shape[0]


def mat_inverse(A: np.ndarray, p: int) -> np.ndarray:
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return _from_flint(_to_flint(np.mod(A, p), p).inv())


# -- tall sparse matrices -------------------------------------------------


def sparse_kernel(D: sp.spmatrix, p: int, seed: int = 0) -> np.ndarray:
    """Canonical kernel basis of a (possibly very tall) sparse matrix mod p.

    The row space is first compressed by a sparse random sketch ``R D``;
    the candidate kernel of the sketch is then checked exactly against D.
    A failed check (sketch lost rank) retries with a larger sketch, and the
    last resort is exact chunked elimination, so the result is always exact.
    """
    D = sp.csr_matrix(D, dtype=np.int64)
    m, n = D.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if m * n <= DENSE_LIMIT or m <= n + 32:
        if m * n <= 4 * DENSE_LIMIT:
            return nullspace(np.mod(D.toarray(), p), p)
        return _chunked_kernel(D, p)
    rng = np.random.default_rng(seed)
    k = min(m, n + 32)
    for _ in range(3):
        rows = np.repeat(np.arange(m), 3)
        targets = rng.integers(0, k, size=rows.size)
        coeffs = rng.integers(1, p, size=rows.size) if p > 2 else np.ones(rows.size, np.int64)
        R = sp.csr_matrix((coeffs, (targets, rows)), shape=(k, m), dtype=np.int64)
        sketch = np.mod((R @ D).toarray(), p)
        N = nullspace(sketch, p)
        if N.shape[0] == 0 or not np.any(np.mod(D @ N.T, p)):
            return N
        k = min(m, k + n)
    return _chunked_kernel(D, p)


def _chunked_kernel(D: sp.csr_matrix, p: int, chunk: int = 4096) -> np.ndarray:
    m, n = D.shape
    basis = np.zeros((0, n), dtype=np.int64)
    for start in range(0, m, chunk):
        block = np.mod(D[start:start + chunk].toarray(), p)
        basis, _ = rref(np.vstack([basis, block]), p)
        if basis.shape[0] == n:
            break
    return nullspace(basis, p)
