"""Randomized structural invariants over the corpus (100 draws per suite)."""

import numpy as np
from hypothesis import given, strategies as st

import helpers
from fusionlab import linalg
from fusionlab.checks import strongly_embedded_descent
from fusionlab.cohom import BarComplex
from fusionlab.corpus import builtin_group
from fusionlab.fusion import build_fusion, essential_subgroups, fusion_class_of, is_essential_in
from fusionlab.modules import check_pilocal_compatibility, fixed_points
from fusionlab.nerve import collection_members, delta_S_comparison, homofunctor_map
from fusionlab.perm import (
    O_p_residual,
    contains_strongly_p_embedded,
    direct_product,
    generate,
    is_p_power,
    quotient_group,
    subgroup_lattice,
    transporter,
)
from fusionlab.stable import stable_subspace

kinds = st.sampled_from(["trivial", "twisted"])
seeds = st.integers(0, 2**31 - 1)


def pick(seq, seed):
    return seq[seed % len(seq)]


@given(st.sampled_from(helpers.ALL), kinds, seeds, st.integers(0, 2))
def test_coboundary_squares_to_zero(name, kind, seed, k):
    F = helpers.fusion(name)
    P = pick(F.subgroups, seed)
    eng = helpers.engine(name, kind)
    gd = eng.data(P)
    assert not linalg.matmul_mod(gd.cob[k + 1], gd.cob[k], eng.p).any()
    if P.order <= 8:
        bar = BarComplex(P, helpers.module(name, kind).restrict(P), 2)
        d0, d1 = bar.coboundary(k % 2), bar.coboundary(k % 2 + 1)
        assert not np.mod((d1 @ d0).toarray(), eng.p).any()


@given(st.sampled_from(helpers.SMALL), kinds, st.integers(0, 1))
def test_nerve_coboundary_squares_to_zero(name, kind, k):
    if not helpers.compatible(name, kind):
        return
    nv = helpers.nerve(name, kind)
    assert not np.mod((nv.coboundary(k + 1) @ nv.coboundary(k)).toarray(), nv.p).any()


@given(st.sampled_from(helpers.ALL), kinds, seeds)
def test_degree_zero_is_fixed_points(name, kind, seed):
    F = helpers.fusion(name)
    P = pick(F.subgroups, seed)
    M = helpers.module(name, kind)
    H0 = helpers.engine(name, kind).basis(P, 0)
    assert helpers.same_span(H0.reps, fixed_points(M, P), M.p)


@given(st.sampled_from(helpers.ALL), kinds, seeds, seeds, st.integers(0, 2))
def test_kappa_lift_independence(name, kind, s1, s2, n):
    if not helpers.compatible(name, kind):
        return
    F = helpers.fusion(name)
    P = pick(F.centric_subgroups, s1)
    g = pick(transporter(F.G, P, F.S), s2)
    c = pick(sorted(F.C_G(P).elements), s2 // 7)
    eng = helpers.engine(name, kind)
    grp = F.G.group
    assert np.array_equal(eng.kappa(g, P, F.S, n), eng.kappa(grp.mul(g, c), P, F.S, n))
    # conjugation by an element of P is inner: kappa_x(P, P) = identity
    x = pick(sorted(P.elements), s1 // 5)
    K = eng.kappa(x, P, P, n)
    assert np.array_equal(K, np.eye(K.shape[0], dtype=np.int64))


@given(st.sampled_from(helpers.ALL), kinds, seeds, seeds, seeds, st.integers(0, 2))
def test_kappa_functoriality(name, kind, s1, s2, s3, n):
    F = helpers.fusion(name)
    grp = F.G.group
    P = pick(F.subgroups, s1)
    g = pick(transporter(F.G, P, F.S), s2)
    Q = helpers.fusion(name).subgroups[F.position(generate(grp, [grp.conj(g, x) for x in P.gens]))]
    h = pick(transporter(F.G, Q, F.S), s3)
    eng = helpers.engine(name, kind)
    lhs = eng.kappa(grp.mul(h, g), P, F.S, n)
    rhs = linalg.matmul_mod(eng.kappa(g, P, Q, n), eng.kappa(h, Q, F.S, n), eng.p)
    assert np.array_equal(lhs, rhs)


@given(st.sampled_from(helpers.SMALL), kinds, st.integers(0, 2), seeds)
def test_delta_image_inside_stable(name, kind, n, seed):
    if not helpers.compatible(name, kind):
        return
    F = helpers.fusion(name)
    eng = helpers.engine(name, kind)
    D = delta_S_comparison(helpers.nerve(name, kind), eng, n, F.S)
    st_ = stable_subspace(F, helpers.module(name, kind), n, "centric", engine=eng)
    if D.shape[1] == 0:
        return
    x = helpers.random_combination(np.eye(D.shape[1], dtype=np.int64), eng.p, seed)
    assert st_.contains(linalg.matmul_mod(D, x[:, None], eng.p).T, eng.p)


@given(st.sampled_from(helpers.ALL), kinds, st.integers(0, 2), seeds, seeds)
def test_stable_monotone_in_family(name, kind, n, s1, s2):
    F = helpers.fusion(name)
    reps = F.class_reps
    rng = np.random.default_rng(s1)
    small = [P for P in reps if rng.random() < 0.5]
    rng2 = np.random.default_rng(s2)
    big = small + [P for P in reps if P not in small and rng2.random() < 0.5]
    eng = helpers.engine(name, kind)
    M = helpers.module(name, kind)
    A = stable_subspace(F, M, n, small, engine=eng, check=False)
    B = stable_subspace(F, M, n, big, engine=eng, check=False)
    assert A.contains(B, eng.p)


@given(st.sampled_from(helpers.SMALL), kinds, st.integers(0, 2), seeds)
def test_transporter_and_linking_nerves_agree(name, kind, n, seed):
    if not helpers.compatible(name, kind):
        return
    T = helpers.nerve(name, kind)
    L = helpers.nerve(name, kind, "linking")
    H = homofunctor_map(T, L, n)
    assert H.shape[0] == H.shape[1] == linalg.rank(H, T.p)
    if H.shape[1]:
        x = helpers.random_combination(np.eye(H.shape[1], dtype=np.int64), T.p, seed)
        assert linalg.matmul_mod(H, x[:, None], T.p).any() == x.any()


@given(st.sampled_from(helpers.SMALL), kinds, st.integers(0, 2),
       st.sampled_from(["cr", "constrained", "quasicentric"]))
def test_nerve_collection_independence(name, kind, n, other):
    if not helpers.compatible(name, kind):
        return
    F = helpers.fusion(name)
    if other in ("constrained", "quasicentric"):
        members = collection_members(F, other)
        if not all(F.info(P).quasicentric for P in members):
            return
        if not check_pilocal_compatibility(helpers.module(name, kind), F.G, members)[0]:
            return
        if other == "quasicentric" and name == "S4@2":
            # 30 s nerve; covered by the collection-independence check in the acceptance file
            return
    eng = helpers.engine(name, kind)
    A = helpers.nerve(name, kind)
    B = helpers.nerve(name, kind, collection=other)
    assert A.bases[n].dim == B.bases[n].dim
    DA = delta_S_comparison(A, eng, n, F.S)
    DB = delta_S_comparison(B, eng, n, F.S)
    assert helpers.same_span(DA.T, DB.T, eng.p)


# -- spot checks: essentials and strongly p-embedded subgroups ----------

_SPE_POOL = (("S3", 2), ("S3", 3), ("S4", 3), ("S5", 2), ("A5", 2), ("A5", 3), ("A5", 5),
             ("F20", 2), ("F21", 3), ("AGL19", 2), ("S4", 2), ("D8", 2), ("SL23", 2))


def _descent_pairs():
    out = []
    for name, p in _SPE_POOL:
        G = builtin_group(name).full
        if not contains_strongly_p_embedded(G, p):
            continue
        for G0 in subgroup_lattice(G):
            if G0.order % p == 0 and is_p_power(G.order // G0.order, p):
                out.append((name, p, G0))
    return out


_DESCENT = _descent_pairs()


@given(seeds)
def test_strongly_embedded_descends(seed):
    name, p, G0 = pick(_DESCENT, seed)
    assert contains_strongly_p_embedded(G0, p)


def test_strongly_embedded_descent_summary():
    proper = [G0 for name, p, G0 in _DESCENT if G0.order < builtin_group(name).order]
    assert len(proper) >= 3
    rep = strongly_embedded_descent(builtin_group("AGL19"), 2)
    assert rep["top"] and rep["tested"] >= 3 and rep["failures"] == []


def _subp_triples():
    out = []
    for name, p in (("S4wrC2", 2), ("S4", 2), ("S4xS3", 2), ("S3wrC3", 3), ("S4xC2", 2)):
        G = builtin_group(name).full
        F = build_fusion(G, p)
        essentials = [P for P in F.subgroups if F.flags(P)["essential"]]
        Q = quotient_group(G, O_p_residual(G, p))
        for K in subgroup_lattice(Q.group.full):
            H = Q.preimage(K)
            S1 = generate(G.group, [x for x in F.S.elements if x in H.elements])
            out.extend((H, S1, P, p) for P in essentials if P.elements < S1.elements)
    return out


_SUBP = _subp_triples()


@given(seeds)
def test_essential_in_p_power_index_subgroup(seed):
    H, S1, P, p = pick(_SUBP, seed)
    assert is_essential_in(H, S1, P, p)


_PRODUCTS = (("S4", "S3", 2), ("S3", "S3", 3), ("S4", "S4", 2), ("S4", "C2", 2), ("A4", "S3", 2),
             ("S3", "C3", 3), ("D8", "S3", 2))


def _product_data(a, b, p):
    G1, G2 = builtin_group(a), builtin_group(b)
    G = direct_product(G1, G2)[0]
    F = build_fusion(G.full, p)
    F1, F2 = build_fusion(G1.full, p), build_fusion(G2.full, p)
    grp = G

    def embed(X, which):
        perms = [X.group.elements[h] for h in X.gens]
        if which == 0:
            imgs = [tuple(h) + tuple(range(G1.degree, G1.degree + G2.degree)) for h in perms]
        else:
            imgs = [tuple(range(G1.degree)) + tuple(G1.degree + x for x in h) for h in perms]
        return generate(grp, [grp.index[g] for g in imgs])

    S1, S2 = embed(F1.S, 0), embed(F2.S, 1)
    predicted = {fusion_class_of(F, generate(grp, list(embed(Q, 0).gens) + list(S2.gens)))
                 for Q in essential_subgroups(F1)}
    predicted |= {fusion_class_of(F, generate(grp, list(S1.gens) + list(embed(Q, 1).gens)))
                  for Q in essential_subgroups(F2)}
    return F, predicted


_PRODUCT_DATA = {key: _product_data(*key) for key in _PRODUCTS}


@given(st.sampled_from(_PRODUCTS), seeds)
def test_product_essentials(key, seed):
    F, predicted = _PRODUCT_DATA[key]
    c = seed % len(F.classes)
    assert F.classes[c].essential == (c in predicted)
