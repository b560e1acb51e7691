"""Named verification checks, the suite runner and their JSON reports.

Every check validates its hypotheses before comparing anything, so a report
distinguishes "hypothesis-failed" from "theorem-violated".  Reports are
deterministic; wall-clock time is included only on request.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg
from .cohom import CohomologyEngine
from .corpus import builtin_group, group_from_doc, load_json, module_from_doc
from .errors import CellCapExceeded, IncompatibleAction, NotConstrained
from .fusion import (
    build_fusion,
    essential_subgroups,
    fusion_class_of,
    is_constrained,
    is_essential_in,
    model_of,
)
from .modules import GModule, check_pilocal_compatibility
from .nerve import (
    NerveComplex,
    build_linking,
    build_transporter,
    collection_members,
    delta_S_comparison,
    homofunctor_map,
)
from .perm import (
    O_p_residual,
    O_pprime_residual,
    PermGroup,
    contains_strongly_p_embedded,
    direct_product,
    generate,
    is_p_group,
    is_p_power,
    is_p_solvable,
    quotient_group,
    subgroup_lattice,
)
from .stable import (
    compare_subspaces,
    opprime_stable_and_fixed,
    restriction_image,
    stable_subspace,
    wreath_split_check,
)

MAX_DEGREE = 6

CHECKS = (
    "cartan-eilenberg", "theorem-a", "constrained", "coprime", "pnilpotent", "psolvable",
    "grodal", "fixed-point-lemma", "wreath", "shapiro", "homofunctor",
    "collection-independence", "subpessential", "product-essentials",
)

PASS = "pass"
VIOLATED = "theorem-violated"
HYPOTHESIS = "hypothesis-failed"
BUDGET = "skipped (budget)"
EXIT_CODES = {PASS: 0, VIOLATED: 1, HYPOTHESIS: 2, BUDGET: 3}


@dataclass
class CheckSpec:
    name: str
    group: object
    prime: int
    module: object = "trivial"
    max_degree: int = 2
    collection: str = "centric"
    expect: dict | None = None

    def __post_init__(self):
        if self.name not in CHECKS:
            raise ValueError(f"unknown check {self.name!r}")
        if self.prime < 2 or any(self.prime % q == 0 for q in range(2, int(self.prime ** 0.5) + 1)):
            raise ValueError(f"{self.prime} is not prime")
        if not 0 <= self.max_degree <= MAX_DEGREE:
            raise ValueError(f"degree bound {self.max_degree} outside 0..{MAX_DEGREE}")
        for ref in (self.group, self.module):
            if isinstance(ref, str) and ref.endswith(".json") and not Path(ref).exists():
                raise FileNotFoundError(ref)

    @classmethod
    def from_dict(cls, doc: dict) -> "CheckSpec":
        return cls(doc["check"], doc["group"], int(doc["prime"]), doc.get("module", "trivial"),
                   int(doc.get("max_degree", 2)), doc.get("collection", "centric"), doc.get("expect"))

    def label(self) -> str:
        g = self.group if isinstance(self.group, str) else self.group.get("name", self.group.get("builtin", "G"))
        m = self.module if isinstance(self.module, str) else "custom"
        return f"{Path(str(g)).stem}@{self.prime}/{m}/n<={self.max_degree}"


@dataclass
class CheckReport:
    check: str
    instance: str
    degrees: list
    verdict: str
    telemetry: dict = field(default_factory=dict)
    witness: object = None
    details: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_dict(self) -> dict:
        out = {"check": self.check, "instance": self.instance, "degrees": self.degrees,
               "verdict": self.verdict, "telemetry": self.telemetry}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return repr(obj)


class _Outcome(Exception):
    """Early exit from a check with a fixed verdict."""

    def __init__(self, verdict, witness=None, telemetry=None):
        super().__init__(verdict)
        self.verdict = verdict
        self.witness = witness
        self.telemetry = telemetry or {}


def _row(n, a, b, contained=None) -> dict:
    return {"n": n, "lhs_dim": int(a), "rhs_dim": int(b), "equal": int(a) == int(b), "contained": contained}


def _rank(A, p) -> int:
    return linalg.rank(A, p) if A.size else 0


# -- shared context -------------------------------------------------------


class _Context:
    def __init__(self, spec: CheckSpec):
        self.spec = spec
        self.p = spec.prime
        self.n = spec.max_degree
        self.name, self.Gp = group_from_doc(spec.group)
        self.G = self.Gp.full
        self.telemetry: dict = {}

    @property
    def F(self):
        if not hasattr(self, "_F"):
            self._F = build_fusion(self.G, self.p)
        return self._F

    @property
    def M(self) -> GModule:
        if not hasattr(self, "_M"):
            self._M = module_from_doc(self.spec.module, self.name, self.Gp, self.p)
        return self._M

    @property
    def engine(self) -> CohomologyEngine:
        if not hasattr(self, "_eng"):
            self._eng = CohomologyEngine(self.M, self.n)
        return self._eng

    def require_compatible(self, collection="centric"):
        members = collection_members(self.F, collection)
        ok, witness = check_pilocal_compatibility(self.M, self.G, members)
        if not ok:
            P, g = witness
            raise _Outcome(HYPOTHESIS, {"reason": "O^p(C_G(P)) acts non-trivially",
                                        "P": sorted(P.elements), "g": int(g)})

    def gamma(self) -> PermGroup:
        """Image of G in GL(M)."""
        return quotient_group(self.G, self.M.kernel()).group

    def nerve(self, kind: str, collection=None) -> NerveComplex:
        coll = collection or self.spec.collection
        build = build_linking if kind == "linking" else build_transporter
        C = build(self.G, self.p, coll, self.F)
        nv = NerveComplex(C, self.M, self.n)
        self.telemetry.setdefault("cells", {})[f"{kind}:{coll}"] = {str(k): v for k, v in nv.census.items()}
        return nv

    def dims(self, P=None) -> list:
        return self.engine.dims(self.G if P is None else P)


def _delta_rows(ctx: _Context, nv: NerveComplex, check_iso: bool = True) -> list:
    """Nerve dims against stable(centric) dims, with delta_S containment and rank."""
    rows = []
    for n in range(ctx.n + 1):
        st = stable_subspace(ctx.F, ctx.M, n, "centric", engine=ctx.engine, check=False)
        D = delta_S_comparison(nv, ctx.engine, n, ctx.F.S)
        hn = nv.bases[n].dim
        r = _rank(D, ctx.p)
        image = linalg.rref(D.T, ctx.p)[0] if D.size else np.zeros((0, st.ambient_dim), np.int64)
        inside = st.contains(image, ctx.p)
        iso = r == hn == st.dim
        rows.append(_row(n, hn, st.dim, bool(inside and (iso or not check_iso))))
    return rows


# -- the checks -----------------------------------------------------------


def _cartan_eilenberg(ctx: _Context):
    rows = []
    for n in range(ctx.n + 1):
        st = stable_subspace(ctx.F, ctx.M, n, "all", engine=ctx.engine, check=False)
        img = restriction_image(ctx.F, ctx.M, n, ctx.engine)
        R = ctx.engine.restriction(ctx.G, ctx.F.S, n)
        hg = ctx.engine.basis(ctx.G, n).dim
        injective = _rank(R, ctx.p) == hg
        same = st.contains(img, ctx.p) and _rank(img, ctx.p) == st.dim
        rows.append(_row(n, st.dim, hg, bool(same and injective)))
    return rows, {}


def _theorem_a(ctx: _Context):
    if not ctx.M.is_trivial():
        raise _Outcome(HYPOTHESIS, {"reason": "coefficients carry a non-trivial action"})
    nv = ctx.nerve("linking")
    return _delta_rows(ctx, nv), {}


def _constrained(ctx: _Context):
    if not is_constrained(ctx.F):
        raise _Outcome(HYPOTHESIS, {"reason": "fusion system is not constrained"})
    try:
        model = model_of(ctx.F)
    except NotConstrained as exc:
        raise _Outcome(HYPOTHESIS, {"reason": str(exc)})
    if not model.ok:
        raise _Outcome(HYPOTHESIS, {"reason": "group is not a model", "checks": model.checks})
    ctx.require_compatible("constrained")
    nv = ctx.nerve("transporter", "constrained")
    gc = ctx.dims()
    rows = []
    nerve_dims = []
    for n in range(ctx.n + 1):
        st = stable_subspace(ctx.F, ctx.M, n, "centric", engine=ctx.engine, check=False)
        nd = nv.bases[n].dim
        nerve_dims.append(nd)
        rows.append(_row(n, gc[n], st.dim, nd == gc[n]))
    return rows, {"model_checks": model.checks, "nerve_dims": nerve_dims}


def _coprime(ctx: _Context):
    gamma = ctx.gamma()
    if gamma.order % ctx.p == 0:
        raise _Outcome(HYPOTHESIS, {"reason": "action does not factor through a p'-group",
                                    "image_order": gamma.order})
    ctx.require_compatible()
    return _delta_rows(ctx, ctx.nerve("linking")), {"image_order": gamma.order}


def _pnilpotent(ctx: _Context):
    gamma = ctx.gamma()
    top = O_pprime_residual(gamma.full, ctx.p)
    if not is_p_group(top, ctx.p):
        raise _Outcome(HYPOTHESIS, {"reason": "O^p'(image) is not a p-group", "image_order": gamma.order})
    ctx.require_compatible()
    return _delta_rows(ctx, ctx.nerve("linking")), {"image_order": gamma.order}


def _psolvable(ctx: _Context):
    ctx.require_compatible()
    gamma = ctx.gamma()
    if not is_p_solvable(gamma.full, ctx.p):
        raise _Outcome(HYPOTHESIS, {"reason": "image is not p-solvable", "image_order": gamma.order})
    T = build_transporter(ctx.G, ctx.p, ctx.spec.collection, ctx.F)
    labels = generate(ctx.G.group, sorted(set(T.label.tolist())))
    if labels.order != ctx.G.order:
        raise _Outcome(HYPOTHESIS, {"reason": "transporter labels do not generate G",
                                    "generated_order": labels.order})
    nT = ctx.nerve("transporter")
    nL = ctx.nerve("linking")
    gc = ctx.dims()
    rows = []
    for n in range(ctx.n + 1):
        H = homofunctor_map(nT, nL, n)
        iso = _rank(H, ctx.p) == nT.bases[n].dim == nL.bases[n].dim
        rows.append(_row(n, nT.bases[n].dim, gc[n], bool(iso)))
    return rows, {"image_order": gamma.order}


def _grodal(ctx: _Context):
    rows = []
    for n in range(ctx.n + 1):
        A = stable_subspace(ctx.F, ctx.M, n, "all", engine=ctx.engine, check=False)
        B = stable_subspace(ctx.F, ctx.M, n, "grodal", engine=ctx.engine, check=False)
        cmp = compare_subspaces(A, B, ctx.p)
        rows.append(_row(n, A.dim, B.dim, cmp["verdict"] == "equal"))
    family = stable_subspace(ctx.F, ctx.M, 0, "grodal", engine=ctx.engine, check=False)
    return rows, {"family_size": family.conditions}


def _fixed_point(ctx: _Context):
    ctx.require_compatible()
    rows = []
    for n in range(ctx.n + 1):
        st = stable_subspace(ctx.F, ctx.M, n, "centric", engine=ctx.engine, check=False)
        rep = opprime_stable_and_fixed(ctx.F, ctx.M, n, engine=ctx.engine)
        same = compare_subspaces(st, rep.fixed, ctx.p)["verdict"] == "equal"
        rows.append(_row(n, st.dim, rep.fixed.dim, same))
    return rows, {"outer_classes": len(rep.reps)}


def _wreath(ctx: _Context, parts: str):
    rep = wreath_split_check(ctx.Gp, ctx.p, ctx.M, ctx.n)
    if parts == "wreath":
        ess = rep["essentials"]
        rows = [_row(0, len(ess["brute_force"]), len(ess["predicted"]), ess["ok"])]
        return rows, {"essentials": ess}
    rows = []
    for a, b in zip(rep["shapiro"]["group"], rep["res_ind"]["rows"]):
        rows.append(_row(a["n"], a["lhs_dim"], a["rhs_dim"], b["equal"]))
    for a in rep["shapiro"]["sylow"]:
        rows.append(_row(a["n"], a["lhs_dim"], a["rhs_dim"], None))
    return rows, {"shapiro": rep["shapiro"], "res_ind": rep["res_ind"]}


def _homofunctor(ctx: _Context):
    ctx.require_compatible(ctx.spec.collection)
    nT = ctx.nerve("transporter")
    nL = ctx.nerve("linking")
    rows = []
    for n in range(ctx.n + 1):
        H = homofunctor_map(nT, nL, n)
        iso = _rank(H, ctx.p) == nT.bases[n].dim == nL.bases[n].dim
        rows.append(_row(n, nT.bases[n].dim, nL.bases[n].dim, bool(iso)))
    return rows, {}


def _collection_independence(ctx: _Context):
    ctx.require_compatible("centric")
    a = ctx.nerve("transporter", "centric")
    b = ctx.nerve("transporter", "cr")
    quasi = {P.elements for P in collection_members(ctx.F, "quasicentric")}
    constrained = collection_members(ctx.F, "constrained")
    extra = None
    if all(P.elements in quasi for P in constrained):
        extra = ctx.nerve("transporter", "constrained")
    rows = []
    for n in range(ctx.n + 1):
        same = None if extra is None else extra.bases[n].dim == a.bases[n].dim
        rows.append(_row(n, a.bases[n].dim, b.bases[n].dim, same))
    return rows, {"constrained_included": extra is not None}


def _subpessential(ctx: _Context):
    F = ctx.F
    top = O_p_residual(ctx.G, ctx.p)
    Q = quotient_group(ctx.G, top)
    essentials = [P for P in F.subgroups if F.flags(P)["essential"]]
    tested, failures = 0, []
    for K in subgroup_lattice(Q.group.full):
        H = Q.preimage(K)
        S1 = generate(ctx.G.group, [x for x in F.S.elements if x in H.elements])
        for P in essentials:
            if P.elements < S1.elements:
                tested += 1
                if not is_essential_in(H, S1, P, ctx.p):
                    failures.append({"H_order": H.order, "P": sorted(P.elements)})
    rows = [_row(0, tested, tested - len(failures), not failures)]
    return rows, {"pairs_tested": tested, "failures": failures}


def _product_factors(ctx: _Context):
    g = ctx.spec.group
    if isinstance(g, dict) and "product" in g:
        names = g["product"]
    elif isinstance(g, str) and "x" in g:
        names = g.split("x")
    else:
        raise _Outcome(HYPOTHESIS, {"reason": "group is not given as a direct product"})
    if len(names) != 2:
        raise _Outcome(HYPOTHESIS, {"reason": "exactly two factors are expected"})
    return [builtin_group(n) for n in names]


def _product_essentials(ctx: _Context):
    G1, G2 = _product_factors(ctx)
    G = direct_product(G1, G2)[0]
    p = ctx.p
    F = build_fusion(G.full, p)
    F1, F2 = build_fusion(G1.full, p), build_fusion(G2.full, p)

    def embed(X, which):
        perms = [X.group.elements[h] for h in X.gens]
        if which == 0:
            imgs = [tuple(h) + tuple(range(G1.degree, G1.degree + G2.degree)) for h in perms]
        else:
            imgs = [tuple(range(G1.degree)) + tuple(G1.degree + x for x in h) for h in perms]
        return generate(G, [G.index[g] for g in imgs])

    S1, S2 = embed(F1.S, 0), embed(F2.S, 1)
    predicted = set()
    for Q in essential_subgroups(F1):
        X = generate(G, list(embed(Q, 0).gens) + list(S2.gens))
        predicted.add(fusion_class_of(F, X))
    for Q in essential_subgroups(F2):
        X = generate(G, list(S1.gens) + list(embed(Q, 1).gens))
        predicted.add(fusion_class_of(F, X))
    brute = {c for c, info in enumerate(F.classes) if info.essential}
    rows = [_row(0, len(brute), len(predicted), brute == predicted)]
    return rows, {"brute_force": sorted(brute), "predicted": sorted(predicted)}


_DISPATCH = {
    "cartan-eilenberg": _cartan_eilenberg,
    "theorem-a": _theorem_a,
    "constrained": _constrained,
    "coprime": _coprime,
    "pnilpotent": _pnilpotent,
    "psolvable": _psolvable,
    "grodal": _grodal,
    "fixed-point-lemma": _fixed_point,
    "wreath": lambda ctx: _wreath(ctx, "wreath"),
    "shapiro": lambda ctx: _wreath(ctx, "shapiro"),
    "homofunctor": _homofunctor,
    "collection-independence": _collection_independence,
    "subpessential": _subpessential,
    "product-essentials": _product_essentials,
}


def run_check(name: str, spec: CheckSpec, timings: bool = False) -> CheckReport:
    if name != spec.name:
        spec = CheckSpec(name, spec.group, spec.prime, spec.module, spec.max_degree, spec.collection, spec.expect)
    ctx = _Context(spec)
    start = time.perf_counter()
    witness = None
    details: dict = {}
    rows: list = []
    try:
        rows, details = _DISPATCH[name](ctx)
        ok = all(r["equal"] and r["contained"] is not False for r in rows)
        verdict = PASS if ok else VIOLATED
        if not ok:
            witness = {"degrees": [r["n"] for r in rows if not (r["equal"] and r["contained"] is not False)]}
    except _Outcome as out:
        verdict, witness = out.verdict, out.witness
    except IncompatibleAction as exc:
        verdict = HYPOTHESIS
        witness = {"reason": str(exc)}
    except CellCapExceeded as exc:
        verdict = BUDGET
        witness = {"reason": str(exc),
                   "census": {str(k): v for k, v in (exc.census or {}).items()}}
    if spec.expect and verdict == PASS and "dims" in spec.expect:
        got = [r["lhs_dim"] for r in rows]
        if got != list(spec.expect["dims"]):
            verdict = VIOLATED
            witness = {"expected_dims": spec.expect["dims"], "lhs_dims": got}
    telemetry = dict(ctx.telemetry)
    if timings:
        telemetry["seconds"] = round(time.perf_counter() - start, 3)
    return CheckReport(name, spec.label(), rows, verdict, telemetry, witness, details)


# -- suites ---------------------------------------------------------------


def _spec(check, group, p, module="trivial", n=2, collection="centric", expect=None) -> dict:
    out = {"check": check, "group": group, "prime": p, "module": module, "max_degree": n,
           "collection": collection}
    if expect:
        out["expect"] = expect
    return out


def acceptance_manifest() -> list:
    """Specs behind the acceptance criteria that a single run_check can express."""
    corpus = [("S3", 2), ("S3", 3), ("S4", 2), ("A4", 2), ("D8", 2), ("S3wrC3", 3), ("SL23", 3)]
    specs = []
    for g, p in corpus:
        for m in ("trivial", "twisted"):
            specs.append(_spec("cartan-eilenberg", g, p, m, 3))
    for g, p in (("S3", 3), ("S4", 2), ("A4", 2)):
        specs.append(_spec("theorem-a", g, p, "trivial", 2))
    specs.append(_spec("constrained", "S4", 2, "twisted", 2))
    specs.append(_spec("constrained", "S3", 3, "sign", 2))
    specs.append(_spec("coprime", "S3", 3, "sign", 3, expect={"dims": [0, 1, 1, 0]}))
    for g, p in corpus:
        if g != "SL23":
            specs.append(_spec("fixed-point-lemma", g, p, "twisted", 3))
    specs.append(_spec("psolvable", "S4", 2, "twisted", 2))
    specs.append(_spec("grodal", "S3", 3, "sign", 3))
    specs.append(_spec("grodal", "S4", 2, "trivial", 3))
    specs.append(_spec("grodal", "S4", 2, "twisted", 3))
    specs.append(_spec("wreath", "S3", 3, "trivial", 2))
    specs.append(_spec("shapiro", "S3", 3, "trivial", 2))
    specs.append(_spec("shapiro", "S3", 3, "sign", 2))
    return specs


BUILTIN_MANIFESTS = {"acceptance": acceptance_manifest}


def load_manifest(source) -> list:
    if isinstance(source, str) and source in BUILTIN_MANIFESTS:
        return BUILTIN_MANIFESTS[source]()
    doc = load_json(source) if not isinstance(source, list) else source
    if isinstance(doc, dict):
        doc = doc.get("checks", [])
    return list(doc)


def suite_exit_code(reports: list) -> int:
    verdicts = {r.verdict for r in reports}
    for v in (VIOLATED, HYPOTHESIS, BUDGET):
        if v in verdicts:
            return EXIT_CODES[v]
    return 0


def run_suite(manifest, timings: bool = False) -> dict:
    entries = load_manifest(manifest)
    reports = [run_check(d["check"], CheckSpec.from_dict(d), timings) for d in entries]
    counts = {v: sum(r.verdict == v for r in reports) for v in EXIT_CODES}
    return {
        "reports": [r.to_dict() for r in reports],
        "summary": counts,
        "exit_code": suite_exit_code(reports),
    }


def suite_summary(result: dict) -> str:
    lines = [f"{r['verdict']:<18} {r['check']:<24} {r['instance']}" for r in result["reports"]]
    s = result["summary"]
    lines.append(f"{len(result['reports'])} checks: " + ", ".join(f"{v} {k}" for k, v in s.items() if v))
    return "\n".join(lines)


# -- spot checks not tied to a fusion system ----------------------------


def strongly_embedded_descent(G, p: int) -> dict:
    """For every subgroup G0 of p-power index with p | |G0|: if G has a strongly
    p-embedded subgroup then so does G0.  Returns counts and any counterexample.
    """
    G = G if not isinstance(G, PermGroup) else G.full
    top = contains_strongly_p_embedded(G, p)
    tested, failures = 0, []
    for G0 in subgroup_lattice(G):
        if G0.order % p or not is_p_power(G.order // G0.order, p):
            continue
        tested += 1
        if top and not contains_strongly_p_embedded(G0, p):
            failures.append(sorted(G0.elements))
    return {"top": top, "tested": tested, "failures": failures}
