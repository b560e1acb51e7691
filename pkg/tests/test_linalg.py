import itertools

import numpy as np
import scipy.sparse as sp
from hypothesis import given, strategies as st

from fusionlab import linalg


def brute_rank(A, p):
    """Size of the row space by enumeration (tiny matrices only)."""
    rows = [tuple(r) for r in np.mod(A, p)]
    span = {tuple([0] * A.shape[1])}
    for r in rows:
        span = {tuple((np.array(v) + c * np.array(r)) % p) for v in span for c in range(p)}
    return round(np.log(len(span)) / np.log(p))


matrices = st.tuples(st.sampled_from([2, 3, 5]), st.integers(1, 4), st.integers(1, 5), st.integers(0, 2**32 - 1))


def make(p, r, c, seed):
    return np.random.default_rng(seed).integers(0, p, size=(r, c))


@given(matrices)
def test_rank_matches_enumeration(args):
    p, r, c, seed = args
    A = make(p, r, c, seed)
    assert linalg.rank(A, p) == brute_rank(A, p)


@given(matrices)
def test_nullspace_is_kernel(args):
    p, r, c, seed = args
    A = make(p, r, c, seed)
    K = linalg.nullspace(A, p)
    assert K.shape[0] == c - linalg.rank(A, p)
    assert not np.mod(A @ K.T, p).any()


def test_gf2_path_agrees_with_general_path():
    rng = np.random.default_rng(1)
    A = rng.integers(0, 2, size=(70, 150))
    R2, piv2 = linalg.rref(A, 2)
    R, piv = linalg._from_flint(linalg._to_flint(A, 2).rref()[0]), None
    R = R[: len(piv2)]
    assert np.array_equal(R2, R)


def test_sparse_kernel_matches_dense():
    rng = np.random.default_rng(7)
    D = sp.csr_matrix(rng.integers(0, 3, size=(40, 60)) * (rng.random((40, 60)) < 0.1))
    K = linalg.sparse_kernel(D, 3)
    assert K.shape[0] == 60 - linalg.rank(D.toarray(), 3)
    assert not np.mod(D @ K.T, 3).any()


def test_solve_and_inverse():
    A = np.array([[1, 2], [3, 4]])
    inv = linalg.mat_inverse(A, 5)
    assert np.array_equal(np.mod(A @ inv, 5), np.eye(2))
    X = linalg.solve(A, np.eye(2, dtype=np.int64), 5)
    assert np.array_equal(np.mod(A @ X, 5), np.eye(2))


def test_pivots_lexicographic():
    A = np.array([[0, 1, 1], [1, 1, 0]])
    R, piv = linalg.rref(A, 2)
    assert piv == [0, 1]
    assert R.tolist() == [[1, 0, 1], [0, 1, 1]]
    assert list(itertools.chain(*R.tolist())) == [1, 0, 1, 0, 1, 1]
