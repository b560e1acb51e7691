"""The fusion system F_S(G) of a finite group at a prime.

Everything is realizable: morphisms are conjugations by elements of G, and
each morphism remembers one transporter element (its lift).  Subgroups of
the Sylow subgroup S are enumerated once and addressed by their position in
``FusionData.subgroups``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .errors import ClosureCapExceeded, NotConstrained
from .modules import GModule
from .perm import (
    O_p,
    O_p_residual,
    O_pprime_residual,
    PermGroup,
    Quotient,
    Subgroup,
    _as_sub,
    all_subgroups,
    center,
    centralizer,
    conjugate,
    contains_strongly_p_embedded,
    generate,
    intersection,
    is_normal,
    join,
    normal_closure,
    normalizer,
    p_part,
    p_subgroup_poset_components,
    quotient_group,
    sylow_subgroup,
    transporter,
)

CLOSURE_CAP = 1_000_000


@dataclass(frozen=True)
class GroupHom:
    """x -> g x g^-1 from source into target; ``images`` follows source.sorted."""

    source: Subgroup
    target: Subgroup
    lift: int
    images: tuple

    def __call__(self, x: int) -> int:
        return self.images[self.source.sorted.index(x)]

    def image(self) -> Subgroup:
        return conjugate(self.source, self.lift)


@dataclass
class ClassInfo:
    members: list  # indices into FusionData.subgroups
    rep: int  # fully normalized representative
    centric: bool
    radical: bool
    quasicentric: bool
    essential: bool
    aut_order: int
    out_order: int


@dataclass
class FusionData:
    G: Subgroup
    p: int
    S: Subgroup
    subgroups: list
    index: dict  # frozenset of elements -> position
    classes: list
    class_of: list
    _norm: dict = field(default_factory=dict, repr=False)
    _cent: dict = field(default_factory=dict, repr=False)

    # -- cached local data -------------------------------------------------

    def N_G(self, P: Subgroup) -> Subgroup:
        if P.elements not in self._norm:
            self._norm[P.elements] = normalizer(self.G, P)
        return self._norm[P.elements]

    def C_G(self, P: Subgroup) -> Subgroup:
        if P.elements not in self._cent:
            self._cent[P.elements] = centralizer(self.G, P)
        return self._cent[P.elements]

    def N_S(self, P: Subgroup) -> Subgroup:
        return intersection(self.N_G(P), self.S)

    def position(self, P: Subgroup) -> int:
        return self.index[P.elements]

    def info(self, P: Subgroup) -> ClassInfo:
        return self.classes[self.class_of[self.position(P)]]

    @property
    def class_reps(self) -> list:
        return [self.subgroups[c.rep] for c in self.classes]

    def fully_normalized(self, P: Subgroup) -> bool:
        c = self.info(P)
        best = max(self.N_S(self.subgroups[m]).order for m in c.members)
        return self.N_S(P).order == best

    def flags(self, P: Subgroup) -> dict:
        c = self.info(P)
        fn = self.fully_normalized(P)
        return {
            "centric": c.centric,
            "radical": c.radical,
            "quasicentric": c.quasicentric,
            "essential": c.essential and fn,
            "fully_normalized": fn,
        }

    def members_where(self, flag: str) -> list:
        return [P for P in self.subgroups if self.flags(P)[flag]]

    @cached_property
    def centric_subgroups(self) -> list:
        return [P for P in self.subgroups if self.info(P).centric]


def build_fusion(G, p: int) -> FusionData:
    G = _as_sub(G)
    if G.order % p:
        raise ValueError(f"{p} does not divide |G| = {G.order}")
    S = sylow_subgroup(G, p)
    subs = all_subgroups(S, p)
    index = {P.elements: i for i, P in enumerate(subs)}
    F = FusionData(G, p, S, subs, index, [], [-1] * len(subs))
    for i, P in enumerate(subs):
        if F.class_of[i] >= 0:
            continue
        members = sorted(
            index[K.elements]
            for K in _conjugates_in(G, P, S)
        )
        cid = len(F.classes)
        for m in members:
            F.class_of[m] = cid
        best = max(F.N_S(subs[m]).order for m in members)
        rep = min((m for m in members if F.N_S(subs[m]).order == best), key=lambda m: subs[m].key)
        F.classes.append(_classify(F, subs[rep], members, rep))
    return F


def _conjugates_in(G: Subgroup, P: Subgroup, S: Subgroup) -> list:
    """G-conjugates of P that lie in S."""
    seen = {P.elements: P}
    queue = deque([P])
    while queue:
        H = queue.popleft()
        for g in G.gens:
            K = conjugate(H, g)
            if K.elements not in seen:
                seen[K.elements] = K
                queue.append(K)
    return [K for K in seen.values() if K.elements <= S.elements]


def _classify(F: FusionData, P: Subgroup, members: list, rep: int) -> ClassInfo:
    p = F.p
    N, C = F.N_G(P), F.C_G(P)
    Z = center(P)
    centric = p_part(C.order, p) == Z.order
    quasicentric = O_p_residual(C, p).order % p != 0
    out = out_group(F, P)
    radical = O_p(out.group.full, p).order == 1
    proper = P.order < F.S.order
    essential = proper and centric and contains_strongly_p_embedded(out.group.full, p)
    aut = N.order // C.order
    inn = P.order // Z.order
    return ClassInfo(members, rep, centric, radical, quasicentric, essential, aut, aut // inn)


def out_group(F: FusionData, P: Subgroup) -> Quotient:
    """Out_F(P) = N_G(P) / P C_G(P)."""
    N = F.N_G(P)
    return quotient_group(N, join(P, F.C_G(P)))


def aut_group(F: FusionData, P: Subgroup) -> Quotient:
    """Aut_F(P) = N_G(P) / C_G(P)."""
    return quotient_group(F.N_G(P), F.C_G(P))


# -- Hom-sets -------------------------------------------------------------


def hom_F(F: FusionData, P: Subgroup, Q: Subgroup) -> list:
    """One GroupHom per class of T_G(P, Q) modulo C_G(P); lift = least element."""
    grp = F.G.group
    C = F.C_G(P)
    seen = set()
    out = []
    for g in transporter(F.G, P, Q):
        if g in seen:
            continue
        coset = {grp.mul(g, c) for c in C.elements}
        seen |= coset
        out.append(GroupHom(P, Q, g, tuple(grp.conj(g, x) for x in P.sorted)))
    return out


def classify_subgroup(F: FusionData, P: Subgroup) -> dict:
    return F.flags(P)


def essential_subgroups(F: FusionData) -> list:
    return [F.subgroups[c.rep] for c in F.classes if c.essential]


# -- normal subgroups, O_p(F), models -------------------------------------


def normal_in_F(F: FusionData, Q: Subgroup) -> bool:
    """Every phi in Hom_F(P, S) extends to PQ fixing Q, i.e. T_G(P,S) <= N_G(Q) C_G(P)."""
    if not is_normal(F.S, Q):
        return False
    grp = F.G.group
    NQ = F.N_G(Q)
    for P in F.subgroups:
        C = F.C_G(P)
        good = {grp.mul(n, c) for n in NQ.elements for c in C.elements}
        if any(g not in good for g in transporter(F.G, P, F.S)):
            return False
    return True


def Op_of_F(F: FusionData) -> Subgroup:
    cands = [Q for Q in F.subgroups if is_normal(F.S, Q)]
    for Q in sorted(cands, key=lambda H: (-H.order, H.sorted)):
        if normal_in_F(F, Q):
            return Q
    return F.subgroups[0]


def is_constrained(F: FusionData) -> bool:
    return F.info(Op_of_F(F)).centric


@dataclass
class Model:
    group: PermGroup
    quotient: Quotient
    Q: Subgroup
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def class_profile(F: FusionData) -> list:
    """Sorted (order, class size, centric, essential) per F-class."""
    return sorted(
        (F.subgroups[c.rep].order, len(c.members), c.centric, c.essential) for c in F.classes)


def model_of(F: FusionData) -> Model:
    """N_G(Q)/O^p(C_G(Q)) for Q = O_p(F), with the three model properties checked."""
    Q = Op_of_F(F)
    if not F.info(Q).centric:
        raise NotConstrained("O_p(F) is not F-centric")
    p = F.p
    N = F.N_G(Q)
    K = O_p_residual(F.C_G(Q), p)
    quo = quotient_group(N, K)
    M = quo.group
    Mfull = M.full
    # (a) S embeds as a Sylow subgroup
    S_img = quo.image(F.S)
    sylow_ok = S_img.order == F.S.order and p_part(M.order, p) == F.S.order
    # (b) C_M(O_p(M)) <= O_p(M)
    OpM = O_p(Mfull, p)
    cent_ok = centralizer(Mfull, OpM) <= OpM
    # (c) the model realizes the same fusion pattern
    FM = build_fusion(Mfull, p)
    fusion_ok = class_profile(FM) == class_profile(F)
    return Model(M, quo, Q, {"sylow": sylow_ok, "self_centralizing": cent_ok, "fusion": fusion_ok})


# -- hyperfocal subgroup --------------------------------------------------


def hyp_F(F: FusionData) -> Subgroup:
    """Normal closure in S of g^-1 alpha(g), alpha in O^p(Aut_F(P)), g in P."""
    grp = F.G.group
    gens = set()
    for P in F.subgroups:
        for n in O_p_residual(F.N_G(P), F.p).gens:
            for g in P.gens:
                gens.add(grp.mul(grp.inv(g), grp.conj(n, g)))
    # generators suffice once the normal closure in S is taken
    return normal_closure(F.S, gens - {0})


# -- fusion systems generated by automorphism groups -----------------------


@dataclass
class GeneratedFusion:
    """Subsystem generated by given automorphism groups (as lifts) plus inclusions.

    ``reach[i]`` holds, for subgroup i, every morphism out of it as a map
    (tuple of images of the sorted elements) together with one lift.
    """

    F: FusionData
    seeds: dict  # subgroup position -> generator lifts
    reach: dict

    def hom(self, P: Subgroup, Q: Subgroup) -> list:
        maps = self.reach[self.F.position(P)]
        return [(img, g) for img, g in maps.items() if set(img) <= Q.elements]

    def contains(self, P: Subgroup, g: int) -> bool:
        grp = self.F.G.group
        img = tuple(grp.conj(g, x) for x in P.sorted)
        return img in self.reach[self.F.position(P)]

    def hom_counts(self) -> dict:
        return {i: len(m) for i, m in self.reach.items()}


def generate_fusion(F: FusionData, seeds: dict, cap: int = CLOSURE_CAP) -> GeneratedFusion:
    """Close the seeds under restriction and composition.

    Every morphism of the generated system is a composite of restrictions of
    seed automorphisms, so from each source P a search over images suffices.
    """
    grp = F.G.group
    subs = F.subgroups
    # for each X <= S, the seeds applicable to it: generators of A(R) for R >= X
    above = {}
    for i, X in enumerate(subs):
        gens = []
        for r, lifts in seeds.items():
            if X.elements <= subs[r].elements:
                gens.extend(lifts)
        above[i] = list(dict.fromkeys(gens))
    total = 0
    reach = {}
    for i, P in enumerate(subs):
        start = tuple(P.sorted)
        maps = {start: 0}
        queue = deque([(start, 0)])
        while queue:
            img, h = queue.popleft()
            for g in above[F.index[frozenset(img)]]:
                new = tuple(grp.conj(g, y) for y in img)
                if new not in maps:
                    maps[new] = grp.mul(g, h)
                    queue.append((new, maps[new]))
                    total += 1
                    if total > cap:
                        raise ClosureCapExceeded(f"generated fusion exceeds {cap} morphisms")
        reach[i] = maps
    return GeneratedFusion(F, seeds, reach)


def opprime_fusion(F: FusionData, cap: int = CLOSURE_CAP) -> GeneratedFusion:
    """O^{p'}(F): generated by O^{p'}(Aut_F(P)) for all P <= S."""
    seeds = {i: list(O_pprime_residual(F.N_G(P), F.p).gens) for i, P in enumerate(F.subgroups)}
    return generate_fusion(F, seeds, cap)


def with_aut_S(F: FusionData, E: GeneratedFusion, cap: int = CLOSURE_CAP) -> GeneratedFusion:
    """The system generated by E together with Aut_F(S)."""
    seeds = {i: list(l) for i, l in E.seeds.items()}
    top = F.position(F.S)
    seeds[top] = list(dict.fromkeys(seeds.get(top, []) + list(F.N_G(F.S).gens)))
    return generate_fusion(F, seeds, cap)


def hom_F_counts(F: FusionData) -> dict:
    """|Hom_F(P, S)| for every P, from transporter sets."""
    return {i: len(hom_F(F, P, F.S)) for i, P in enumerate(F.subgroups)}


@dataclass
class Out0:
    """Out_F^0(S) as a subgroup of N_G(S) containing S C_G(S)."""

    preimage: Subgroup
    base: Subgroup  # S C_G(S)
    out_order: int  # |Out_F(S)|

    @property
    def order(self) -> int:
        return self.preimage.order // self.base.order


def out0_S(F: FusionData, E: GeneratedFusion | None = None) -> Out0:
    """Classes of Aut_F(S) that restrict to some centric P as a morphism of O^{p'}(F)."""
    E = E or opprime_fusion(F)
    S = F.S
    N = F.N_G(S)
    base = join(S, F.C_G(S))
    good = []
    for n in N.sorted:
        if n in base.elements:
            continue
        if any(E.contains(P, n) for P in F.centric_subgroups):
            good.append(n)
    pre = generate(F.G.group, list(base.gens) + good)
    return Out0(pre, base, N.order // base.order)


def aut_S_opprime(F: FusionData, E: GeneratedFusion) -> list:
    """Lifts n in N_G(S) whose automorphism of S lies in O^{p'}(F)."""
    return [n for n in F.N_G(F.S).sorted if E.contains(F.S, n)]


def aut_S_coset_reps(F: FusionData, E: GeneratedFusion) -> list:
    """Representatives (least lifts) of Aut_F(S) modulo Aut_{O^{p'}(F)}(S)."""
    grp = F.G.group
    S = F.S
    inner = aut_S_opprime(F, E)
    inner_maps = {tuple(grp.conj(n, x) for x in S.sorted) for n in inner}
    reps, covered = [], set()
    for n in F.N_G(S).sorted:
        m = tuple(grp.conj(n, x) for x in S.sorted)
        if m in covered:
            continue
        reps.append(n)
        # the coset alpha * A0 as maps
        for a in inner:
            covered.add(tuple(grp.conj(n, grp.conj(a, x)) for x in S.sorted))
    return reps


# -- M-essential subgroups ------------------------------------------------


def m_essential_conditions(F: FusionData, M: GModule, P: Subgroup) -> dict:
    p = F.p
    G = F.G
    K = M.kernel()
    N, C = F.N_G(P), F.C_G(P)
    NP = quotient_group(N, P).group.full
    comps = p_subgroup_poset_components(NP, p)
    CK = intersection(C, K)
    ZK = intersection(center(P), K)
    sylow_ok = ZK.order == p_part(CK.order, p)
    core = quotient_group(N, join(P, CK)).group.full
    return {
        "poset": comps != 1,
        "sylow": sylow_ok,
        "core": O_p(core, p).order == 1,
    }


def is_p_radical(F: FusionData, P: Subgroup) -> bool:
    """O_p(N_G(P)/P) = 1."""
    return O_p(quotient_group(F.N_G(P), P).group.full, F.p).order == 1


def m_essential_subgroups(F: FusionData, M: GModule) -> list:
    """Class representatives satisfying the three M-essential conditions."""
    return [P for P in F.class_reps if all(m_essential_conditions(F, M, P).values())]


def grodal_family(F: FusionData, M: GModule) -> list:
    """S together with the p-radical M-essential class representatives."""
    fam = [F.S]
    for P in m_essential_subgroups(F, M):
        if P != F.S and is_p_radical(F, P):
            fam.append(P)
    return fam


# -- essentials without a full classification -----------------------------


def is_essential_in(G, S: Subgroup, P: Subgroup, p: int) -> bool:
    """Whether P is essential in the fusion system of G on its Sylow S.

    Uses only N_G(P) and C_G(P), so it stays cheap for large S.
    """
    G = _as_sub(G)
    if not P < S:
        return False
    C = centralizer(G, P)
    if p_part(C.order, p) != center(P).order:
        return False
    N = normalizer(G, P)
    if intersection(N, S).order != p_part(N.order, p):
        return False
    out = quotient_group(N, join(P, C))
    return contains_strongly_p_embedded(out.group.full, p)


def fusion_class_of(F: FusionData, X: Subgroup) -> int:
    """F-class index of a p-subgroup of G, after conjugating it into S."""
    T = transporter(F.G, X, F.S)
    if not T:
        raise ValueError("subgroup is not conjugate into S")
    return F.class_of[F.position(conjugate(X, T[0]))]
