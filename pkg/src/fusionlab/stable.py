"""Stable elements: the subspace of H^n(S, M) on which every chosen
conjugation map agrees with restriction.

A condition is a pair (P, g) with g P g^-1 <= S; it demands
kappa_g(x) = Res^S_P(x).  Conditions are imposed per class representative
with double-coset lifts in S \\ T_G(P, S) / P; ``full_pairs=True`` imposes
every (P, g) pair instead and serves as the oracle for that reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .cohom import CohomologyEngine
from .errors import CellCapExceeded, IncompatibleAction
from .fusion import (
    FusionData,
    GeneratedFusion,
    aut_S_coset_reps,
    build_fusion,
    essential_subgroups,
    fusion_class_of,
    grodal_family,
    opprime_fusion,
)
from .modules import GModule, check_pilocal_compatibility, coinduce, induce, restrict_module
from .perm import (
    O_pprime_residual,
    O_p,
    PermGroup,
    Subgroup,
    WreathProduct,
    generate,
    normalizer,
    transporter,
    wreath_product_cp,
)

COLLECTIONS = ("all", "centric", "cr", "grodal")


@dataclass
class StableSubspace:
    degree: int
    basis: np.ndarray  # rows, RREF, coordinates in the canonical basis of H^n(S, M)
    ambient_dim: int
    family: str
    conditions: int

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, other: "StableSubspace | np.ndarray", p: int) -> bool:
        V = other.basis if isinstance(other, StableSubspace) else np.atleast_2d(other)
        if V.shape[0] == 0:
            return True
        R, piv = linalg.rref(self.basis, p) if self.dim else (self.basis, [])
        return linalg.span_contains(R, piv, V, p)


def family_members(F: FusionData, M: GModule, collection) -> list:
    """Class representatives for a named collection, or a given list."""
    if not isinstance(collection, str):
        return list(collection)
    if collection == "all":
        return F.class_reps
    if collection == "centric":
        return [P for P in F.class_reps if F.info(P).centric]
    if collection == "cr":
        return [P for P in F.class_reps if F.info(P).centric and F.info(P).radical]
    if collection == "grodal":
        return grodal_family(F, M)
    raise ValueError(f"unknown collection {collection!r}")


def double_coset_lifts(F: FusionData, P: Subgroup) -> list:
    """Least representatives of S \\ T_G(P, S) / P."""
    grp = F.G.group
    seen = set()
    reps = []
    for g in transporter(F.G, P, F.S):
        if g in seen:
            continue
        reps.append(g)
        for s in F.S.elements:
            sg = grp.mul(s, g)
            for x in P.elements:
                seen.add(grp.mul(sg, x))
    return reps


def condition_pairs(F: FusionData, members: list, full_pairs: bool = False) -> list:
    if not full_pairs:
        return [(P, g) for P in members for g in double_coset_lifts(F, P)]
    # every member of each class, every transporter element
    out = []
    for P in members:
        for m in F.info(P).members:
            Q = F.subgroups[m]
            out.extend((Q, g) for g in transporter(F.G, Q, F.S))
    return out


def _kernel_in_H(eng: CohomologyEngine, F: FusionData, pairs, n: int) -> np.ndarray:
    S, p = F.S, eng.p
    dimS = eng.basis(S, n).dim
    blocks = []
    for P, g in pairs:
        K = eng.kappa(g, P, S, n)
        R = eng.restriction(S, P, n)
        if K.size:
            blocks.append(np.mod(K - R, p))
    if dimS == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return linalg.kernel_intersection(blocks, dimS, p)


def stable_subspace(F: FusionData, M: GModule, n: int, collection="centric",
                    engine: CohomologyEngine | None = None, full_pairs: bool = False,
                    check: bool = True) -> StableSubspace:
    eng = engine or CohomologyEngine(M, n)
    members = family_members(F, M, collection)
    name = collection if isinstance(collection, str) else "custom"
    if check and name in ("centric", "cr") and not M.is_trivial():
        all_members = [F.subgroups[m] for P in members for m in F.info(P).members]
        ok, witness = check_pilocal_compatibility(M, F.G, all_members)
        if not ok:
            raise IncompatibleAction("stable elements would depend on transporter lifts", witness)
    pairs = condition_pairs(F, members, full_pairs)
    basis = _kernel_in_H(eng, F, pairs, n)
    return StableSubspace(n, basis, eng.basis(F.S, n).dim, name, len(pairs))


# -- index prime to p -----------------------------------------------------


def opprime_condition_pairs(F: FusionData) -> list:
    """(P, g): g generates O^{p'}(N_G(Q)) for some Q >= P, P centric."""
    out = []
    centric = F.centric_subgroups
    for Q in F.subgroups:
        lifts = O_pprime_residual(F.N_G(Q), F.p).gens
        if not lifts:
            continue
        for P in centric:
            if P.elements <= Q.elements:
                out.extend((P, g) for g in lifts)
    return out


def opprime_closure_pairs(F: FusionData, E: GeneratedFusion) -> list:
    """Every morphism of the generated system out of a centric subgroup."""
    out = []
    for P in F.centric_subgroups:
        out.extend((P, g) for _, g in E.hom(P, F.S))
    return out


@dataclass
class FixedPointReport:
    opprime: StableSubspace
    fixed: StableSubspace
    reps: list


def opprime_stable_and_fixed(F: FusionData, M: GModule, n: int,
                             engine: CohomologyEngine | None = None,
                             E: GeneratedFusion | None = None,
                             closure_oracle: bool = False) -> FixedPointReport:
    eng = engine or CohomologyEngine(M, n)
    if not M.is_trivial():
        ok, witness = check_pilocal_compatibility(M, F.G, F.centric_subgroups)
        if not ok:
            raise IncompatibleAction("stable elements would depend on transporter lifts", witness)
    E = E or opprime_fusion(F)
    pairs = opprime_closure_pairs(F, E) if closure_oracle else opprime_condition_pairs(F)
    V = _kernel_in_H(eng, F, pairs, n)
    dimS = eng.basis(F.S, n).dim
    base = StableSubspace(n, V, dimS, "opprime", len(pairs))
    reps = aut_S_coset_reps(F, E)
    p = eng.p
    if V.shape[0] == 0:
        fixed = V
    else:
        blocks = []
        for g in reps:
            K = eng.kappa(g, F.S, F.S, n)
            blocks.append(linalg.matmul_mod(np.mod(K - np.eye(dimS, dtype=np.int64), p), V.T, p))
        coeff = linalg.kernel_intersection(blocks, V.shape[0], p)
        fixed = linalg.rref(linalg.matmul_mod(coeff, V, p), p)[0] if coeff.size else np.zeros((0, dimS), np.int64)
    return FixedPointReport(base, StableSubspace(n, fixed, dimS, "opprime-fixed", len(reps)), reps)


# -- comparisons ----------------------------------------------------------


def compare_subspaces(A: StableSubspace, B: StableSubspace, p: int) -> dict:
    a_in_b = B.contains(A, p)
    b_in_a = A.contains(B, p)
    if a_in_b and b_in_a:
        verdict = "equal"
    elif a_in_b:
        verdict = "A<=B"
    elif b_in_a:
        verdict = "B<=A"
    else:
        verdict = "incomparable"
    return {"dimA": A.dim, "dimB": B.dim, "A_in_B": a_in_b, "B_in_A": b_in_a, "verdict": verdict}


def family_equality(F: FusionData, M: GModule, n: int, familyA, familyB,
                    engine: CohomologyEngine | None = None) -> dict:
    eng = engine or CohomologyEngine(M, n)
    A = stable_subspace(F, M, n, familyA, engine=eng, check=False)
    B = stable_subspace(F, M, n, familyB, engine=eng, check=False)
    return compare_subspaces(A, B, eng.p)


def restriction_image(F: FusionData, M: GModule, n: int, engine: CohomologyEngine) -> np.ndarray:
    """Image of Res^G_S on H^n as RREF rows in H^n(S) coordinates, plus the map's rank."""
    R = engine.restriction(F.G, F.S, n)
    if R.size == 0:
        return np.zeros((0, engine.basis(F.S, n).dim), dtype=np.int64)
    return linalg.rref(R.T, engine.p)[0]


def model_constrained_collection(F: FusionData) -> list:
    """Class representatives containing O_p(G)."""
    Q = O_p(F.G, F.p)
    return [P for P in F.class_reps if Q.elements <= P.elements]


# -- wreath products by C_p -----------------------------------------------


def _block(W: WreathProduct, g: int, i: int) -> tuple:
    """The permutation of block i induced by a base element g."""
    d = W.block
    perm = W.group.elements[g]
    return tuple(perm[i * d + x] - i * d for x in range(d))


def _factor_product(W: WreathProduct, G0: PermGroup, factors: list) -> Subgroup:
    """The subgroup X_1 x ... x X_p of the base, X_i <= G0."""
    gens = [W.embed(i, G0.elements[h]) for i, X in enumerate(factors) for h in X.gens]
    return generate(W.group, gens)


def diagonal_module(W: WreathProduct, G0: PermGroup, M0: GModule) -> GModule:
    """M0 transported to the diagonal copy of G0."""
    return GModule.from_function(M0.p, W.diagonal, lambda g: M0.mats[G0.index[_block(W, g, 0)]])


def first_factor_module(W: WreathProduct, G0: PermGroup, M0: GModule) -> GModule:
    """M0 inflated to the base through the projection onto the first factor."""
    return GModule.from_function(M0.p, W.base, lambda g: M0.mats[G0.index[_block(W, g, 0)]])


def wreath_candidates(W: WreathProduct, G0: PermGroup, F0: FusionData) -> list:
    """Subgroups allowed to be essential in G0 wr C_p, as (type, subgroup, factor Q)."""
    p = W.p
    S0 = F0.S
    out = [("base", _factor_product(W, G0, [S0] * p), S0)]
    for Q in essential_subgroups(F0):
        for i in range(p):
            factors = [S0] * p
            factors[i] = Q
            out.append(("one-factor", _factor_product(W, G0, factors), Q))
        base_Q = _factor_product(W, G0, [Q] * p)
        out.append(("with-cycle", generate(W.group, list(base_Q.gens) + [W.cycle]), Q))
    return out


def _dims_rows(lhs: list, rhs: list) -> list:
    return [{"n": n, "lhs_dim": a, "rhs_dim": b, "equal": a == b, "contained": None}
            for n, (a, b) in enumerate(zip(lhs, rhs))]


def wreath_split_check(G0: PermGroup, p: int, M0: GModule, n: int, endpoint: bool = False,
                       W: WreathProduct | None = None, F: FusionData | None = None) -> dict:
    """Desk-scale checks of the wreath-product statements for G = G0 wr C_p."""
    W = W or wreath_product_cp(G0, p)
    G = W.group.full
    F = F or build_fusion(G, p)
    F0 = build_fusion(G0.full, p)
    report: dict = {}

    # essential classes against the predicted shapes
    brute = sorted(c for c, info in enumerate(F.classes) if info.essential)
    cands = []
    for kind, X, Q in wreath_candidates(W, G0, F0):
        cls = fusion_class_of(F, X)
        entry = {"type": kind, "order": X.order, "class": cls, "essential": F.classes[cls].essential}
        if entry["essential"]:
            N = normalizer(G, X)
            if kind == "base":
                expected = normalizer(G0.full, F0.S).order ** p * p
                entry["normalizer_ok"] = N.order == expected
            elif kind == "one-factor":
                entry["normalizer_ok"] = N.elements <= W.base.elements
            else:
                entry["normalizer_ok"] = N.order // X.order == normalizer(G0.full, Q).order // Q.order
        cands.append(entry)
    predicted = sorted({c["class"] for c in cands if c["essential"]})
    report["essentials"] = {
        "brute_force": [{"class": c, "order": F.subgroups[F.classes[c].rep].order} for c in brute],
        "candidates": cands,
        "predicted": predicted,
        "ok": brute == predicted and all(c.get("normalizer_ok", True) for c in cands),
    }

    # Shapiro: coinduction from the diagonal copy, at group and Sylow level
    MD = diagonal_module(W, G0, M0)
    N = coinduce(MD, W.diagonal, G)
    g_lhs = CohomologyEngine(N, n).dims(G)
    g_rhs = CohomologyEngine(M0, n).dims(G0.full)
    S0 = F0.S
    SW = wreath_candidates(W, G0, F0)[0][1]
    SW = generate(W.group, list(SW.gens) + [W.cycle])
    S0D = generate(W.group, [W.diag(G0.elements[h]) for h in S0.gens])
    NS = coinduce(restrict_module(MD, S0D), S0D, SW)
    s_lhs = CohomologyEngine(NS, n).dims(SW)
    s_rhs = CohomologyEngine(M0, n).dims(S0)
    report["shapiro"] = {
        "coinduced_dim": N.dim,
        "index": G.order // W.diagonal.order,
        "group": _dims_rows(g_lhs, g_rhs),
        "sylow": _dims_rows(s_lhs, s_rhs),
        "ok": g_lhs == g_rhs and s_lhs == s_rhs and N.dim == G.order // W.diagonal.order * M0.dim,
    }

    # Res Ind over the base: p conjugate copies
    MB = first_factor_module(W, G0, M0)
    RI = restrict_module(induce(MB, W.base, G), W.base)
    eng_ri = CohomologyEngine(RI, n)
    lhs = eng_ri.dims(W.base)
    rhs = [p * x for x in CohomologyEngine(MB, n).dims(W.base)]
    report["res_ind"] = {"rows": _dims_rows(lhs, rhs), "ok": lhs == rhs}

    if endpoint:
        from .nerve import build_transporter, nerve_dims

        eng = CohomologyEngine(N, n)
        try:
            st = [stable_subspace(F, N, k, "centric", engine=eng).dim for k in range(n + 1)]
        except IncompatibleAction as exc:
            st = None
            report["endpoint"] = {"status": "hypothesis-failed", "witness": str(exc)}
        if st is not None:
            try:
                nd = nerve_dims(build_transporter(G, p, "centric", F), N, n)
                report["endpoint"] = {"rows": _dims_rows(st, nd), "ok": st == nd}
            except CellCapExceeded as exc:
                report["endpoint"] = {"status": "skipped (budget)", "census": exc.census, "stable": st}
    report["ok"] = all(report[k]["ok"] for k in ("essentials", "shapiro", "res_ind"))
    return report
