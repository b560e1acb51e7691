import numpy as np
import pytest

from fusionlab.corpus import builtin_group, builtin_wreath, gl22_module, sign_module
from fusionlab.errors import InvalidModule, NotASubgroup
from fusionlab.modules import (
    GModule,
    check_pilocal_compatibility,
    coinduce,
    find_isomorphism,
    fixed_points,
    induce,
    restrict_module,
)
from fusionlab.perm import O_p, generate, subgroup_lattice, sylow_subgroup, trivial_subgroup


def c3_in_s3():
    S3 = builtin_group("S3")
    return S3, next(H for H in subgroup_lattice(S3) if H.order == 3)


def test_trivial_module_is_identity():
    S4 = builtin_group("S4")
    M = GModule.trivial(2, S4.full, dim=3)
    assert M.is_trivial()
    assert all(np.array_equal(M.act(g), np.eye(3)) for g in range(24))


def test_non_homomorphism_rejected():
    S3 = builtin_group("S3")
    # (1 2) acting by a 3-cycle matrix breaks the relation t^2 = 1
    bad = np.array([[0, 1], [2, 2]])
    pairs = [(S3.idx(S3.generators[0]), bad), (S3.idx(S3.generators[1]), np.eye(2, dtype=int))]
    with pytest.raises(InvalidModule):
        GModule.from_generators(3, S3.full, pairs)


def test_singular_matrix_rejected():
    S3 = builtin_group("S3")
    pairs = [(S3.idx(g), np.zeros((1, 1), dtype=int)) for g in S3.generators]
    with pytest.raises(InvalidModule):
        GModule.from_generators(3, S3.full, pairs)


def test_restrictions():
    S3, C3 = c3_in_s3()
    assert restrict_module(GModule.trivial(3, S3.full), C3).is_trivial()
    assert restrict_module(sign_module(S3, 3), C3).is_trivial()
    M = gl22_module(S3)
    R = restrict_module(M, trivial_subgroup(S3))
    assert R.dim == 2 and R.is_trivial()
    S4 = builtin_group("S4")
    with pytest.raises(NotASubgroup):
        restrict_module(M, sylow_subgroup(S4, 2))


def test_fixed_points():
    S3 = builtin_group("S3")
    assert fixed_points(GModule.trivial(3, S3.full, 2)).shape[0] == 2
    assert fixed_points(sign_module(S3, 3)).shape[0] == 0
    C3 = builtin_group("C3")
    M = induce(GModule.trivial(3, trivial_subgroup(C3)), trivial_subgroup(C3), C3.full)
    assert M.dim == 3
    assert fixed_points(M).tolist() == [[1, 1, 1]]


def test_induction_dimensions_and_isomorphism():
    S3, C3 = c3_in_s3()
    M0 = GModule.trivial(3, C3)
    ind, coind = induce(M0, C3, S3.full), coinduce(M0, C3, S3.full)
    assert ind.dim == coind.dim == 2
    assert find_isomorphism(ind, coind) is not None
    S4 = builtin_group("S4")
    V = O_p(S4, 2)
    N = coinduce(GModule.trivial(2, V, 2), V, S4.full)
    assert N.dim == 6 * 2


def test_diagonal_permutation_module():
    W = builtin_wreath("S3", 3)
    S3 = builtin_group("S3")
    diag = generate(W.group, [W.diag(g) for g in S3.generators])
    base = generate(W.group, [W.embed(i, g) for i in range(3) for g in S3.generators])
    N = induce(GModule.trivial(3, diag), diag, base)
    assert N.dim == 36
    assert fixed_points(N, base).shape[0] == 1


def test_compatibility():
    S3, C3 = c3_in_s3()
    assert check_pilocal_compatibility(GModule.trivial(3, S3.full), S3, [C3]) == (True, None)
    assert check_pilocal_compatibility(sign_module(S3, 3), S3, [C3])[0]
    # at p = 2 the sign module over F_3 is not a concern, but C_G(1) = S3 has O^2 = C3 acting on GL22
    ok, witness = check_pilocal_compatibility(gl22_module(S3), S3, [trivial_subgroup(S3)])
    assert not ok
    P, g = witness
    assert P.order == 1 and g in C3.elements
