import numpy as np
import pytest

from fusionlab import linalg
from fusionlab.cohom import CohomologyEngine, bar_cohomology
from fusionlab.corpus import builtin_group, gl22_module, sign_module
from fusionlab.errors import CellCapExceeded, IncompatibleAction, InvalidCollection
from fusionlab.fusion import build_fusion
from fusionlab.modules import GModule
from fusionlab.nerve import (
    NerveComplex,
    build_linking,
    build_transporter,
    chain_census,
    collection_members,
    delta_S_comparison,
    homofunctor_map,
    nerve_cohomology,
    one_object_category,
)
from fusionlab.perm import O_p, sylow_subgroup, trivial_subgroup
from fusionlab.stable import stable_subspace


def dims(bases):
    return [b.dim for b in bases]


def brute_census(C, k):
    """Nondegenerate composable k-chains counted by walking morphisms one at a time."""
    nonid = [m for m in range(C.n_morphisms) if not C.is_identity[m]]
    chains = [[m] for m in nonid]
    if k == 0:
        return C.n_objects
    for _ in range(k - 1):
        chains = [c + [m] for c in chains for m in nonid if C.tgt[m] == C.src[c[-1]]]
    return len(chains)


def test_s3_transporter_and_linking():
    S3 = builtin_group("S3")
    T = build_transporter(S3.full, 3)
    L = build_linking(S3.full, 3)
    assert (T.n_objects, T.n_morphisms) == (1, 6)
    assert (L.n_objects, L.n_morphisms) == (1, 6)
    M = GModule.trivial(3, S3.full)
    assert dims(nerve_cohomology(T, M, 3)) == [1, 0, 0, 1]


def test_p_group_one_object():
    D8 = builtin_group("D8")
    T = build_transporter(D8.full, 2, [D8.full])
    assert (T.n_objects, T.n_morphisms) == (1, 8)


def test_s4_objects_and_linking_at_klein_four():
    S4 = builtin_group("S4")
    F = build_fusion(S4.full, 2)
    T = build_transporter(S4.full, 2, "centric", F)
    assert T.n_objects == len(F.centric_subgroups) == 4
    L = build_linking(S4.full, 2, "centric", F)
    V = O_p(S4, 2)
    i = L.object_index(V)
    assert len(L.hom(i, i)) == 24
    # objects with trivial O^p(C_G(P)) have no quotienting
    assert L.n_morphisms == T.n_morphisms


def test_census_matches_brute_force():
    S4 = builtin_group("S4")
    T = build_transporter(S4.full, 2)
    census = chain_census(T, 3)
    assert census == {0: 4, 1: 84, 2: 1620, 3: 33284}
    assert [brute_census(T, k) for k in range(3)] == [census[0], census[1], census[2]]
    S3 = builtin_group("S3")
    assert chain_census(one_object_category(S3.full, 3), 2)[2] == 25


def test_one_object_matches_bar_complex():
    C2 = builtin_group("C2")
    M = GModule.trivial(2, C2.full)
    assert dims(nerve_cohomology(one_object_category(C2.full, 2), M, 2)) == [1, 1, 1]
    S3 = builtin_group("S3")
    Ms = sign_module(S3, 3)
    assert dims(nerve_cohomology(one_object_category(S3.full, 3), Ms, 3)) == dims(bar_cohomology(S3.full, Ms, 3))


def test_point_category():
    one = trivial_subgroup(builtin_group("S3"))
    C = one_object_category(one, 3)
    M = GModule.trivial(3, one, dim=2)
    assert dims(nerve_cohomology(C, M, 2)) == [2, 0, 0]
    assert chain_census(C, 2) == {0: 1, 1: 0, 2: 0}


def test_delta_identity_for_one_object_sylow():
    D8 = builtin_group("D8")
    M = GModule.trivial(2, D8.full)
    nv = NerveComplex(one_object_category(D8.full, 2), M, 2)
    eng = CohomologyEngine(M, 2)
    for n in range(3):
        D = delta_S_comparison(nv, eng, n, D8.full)
        assert D.shape[0] == D.shape[1] == linalg.rank(D, 2)


def test_delta_image_is_stable_s3():
    S3 = builtin_group("S3")
    F = build_fusion(S3.full, 3)
    M = GModule.trivial(3, S3.full)
    nv = NerveComplex(build_transporter(S3.full, 3, "centric", F), M, 3)
    eng = CohomologyEngine(M, 3)
    D = delta_S_comparison(nv, eng, 3, F.S)
    st = stable_subspace(F, M, 3, "centric", engine=eng)
    assert st.dim == 1 and linalg.rank(D, 3) == 1
    assert st.contains(D.T, 3)


def test_homofunctor_s4():
    S4 = builtin_group("S4")
    F = build_fusion(S4.full, 2)
    M = gl22_module(S4)
    T = NerveComplex(build_transporter(S4.full, 2, "centric", F), M, 2)
    L = NerveComplex(build_linking(S4.full, 2, "centric", F), M, 2)
    for n in range(3):
        H = homofunctor_map(T, L, n)
        assert H.shape[0] == H.shape[1] == linalg.rank(H, 2)


def test_errors():
    S3 = builtin_group("S3")
    F = build_fusion(S3.full, 2)
    with pytest.raises(InvalidCollection):
        collection_members(F, [trivial_subgroup(S3)])
    with pytest.raises(IncompatibleAction):
        NerveComplex(build_linking(S3.full, 2, "all", F), gl22_module(S3), 1)


def test_cell_cap(monkeypatch):
    monkeypatch.setenv("FUSIONLAB_CELL_CAP", "1000")
    S4 = builtin_group("S4")
    with pytest.raises(CellCapExceeded) as info:
        NerveComplex(build_transporter(S4.full, 2), GModule.trivial(2, S4.full), 3)
    assert info.value.census[1] == 84
