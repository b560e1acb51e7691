"""Command line entry point: ``fusionlab <command> ...``; every command prints JSON."""

from __future__ import annotations

import argparse
import json
import sys

from . import linalg
from .checks import CHECKS, CheckSpec, EXIT_CODES, run_check, run_suite, suite_summary
from .cohom import BarComplex, CohomologyEngine
from .corpus import group_from_doc, module_from_doc
from .errors import CellCapExceeded, FusionLabError
from .fusion import (
    Op_of_F,
    build_fusion,
    is_constrained,
    m_essential_conditions,
)
from .nerve import NerveComplex, build_linking, build_transporter, delta_S_comparison
from .stable import stable_subspace


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, default=lambda o: int(o) if hasattr(o, "__int__") else repr(o)))


def _load(args):
    name, Gp = group_from_doc(args.group)
    M = module_from_doc(getattr(args, "module", None), name, Gp, args.prime)
    return name, Gp, M


def cmd_classify(args) -> int:
    name, Gp, _ = _load(args)
    F = build_fusion(Gp.full, args.prime)
    M = module_from_doc(args.module, name, Gp, args.prime) if args.module else None
    classes = []
    for c in F.classes:
        P = F.subgroups[c.rep]
        entry = {
            "order": P.order,
            "size": len(c.members),
            "flags": F.flags(P),
            "aut_order": c.aut_order,
            "out_order": c.out_order,
            "essential": F.flags(P)["essential"],
        }
        if M is not None:
            entry["m_essential"] = all(m_essential_conditions(F, M, P).values())
        classes.append(entry)
    _emit({"group": name, "prime": args.prime, "order": Gp.order, "sylow_order": F.S.order,
           "Op_order": Op_of_F(F).order, "constrained": is_constrained(F), "classes": classes})
    return 0


def cmd_cohomology(args) -> int:
    name, Gp, M = _load(args)
    out = {"group": name, "prime": args.prime, "module_dim": M.dim, "method": args.method}
    if args.method == "bar":
        bases = BarComplex(Gp.full, M, args.max_degree).bases
    else:
        bases = CohomologyEngine(M, args.max_degree).data(Gp.full).bases
    out["dims"] = {str(b.degree): b.dim for b in bases}
    if args.representatives:
        out["representatives"] = {str(b.degree): b.reps.tolist() for b in bases}
    _emit(out)
    return 0


def cmd_nerve(args) -> int:
    name, Gp, M = _load(args)
    F = build_fusion(Gp.full, args.prime)
    build = build_linking if args.kind == "linking" else build_transporter
    C = build(Gp.full, args.prime, args.collection, F)
    out = {"group": name, "prime": args.prime, "collection": args.collection, "kind": args.kind,
           "objects": C.n_objects, "morphisms": C.n_morphisms}
    try:
        nv = NerveComplex(C, M, args.max_degree)
    except CellCapExceeded as exc:
        out.update(status="skipped (budget)", census={str(k): v for k, v in exc.census.items()})
        _emit(out)
        return EXIT_CODES["skipped (budget)"]
    eng = CohomologyEngine(M, args.max_degree)
    out["dims"] = [b.dim for b in nv.bases]
    ranks = []
    for n in range(args.max_degree + 1):
        D = delta_S_comparison(nv, eng, n, F.S)
        ranks.append(linalg.rank(D, args.prime) if D.size else 0)
    out["delta_S_rank"] = ranks
    out["census"] = {str(k): v for k, v in nv.census.items()}
    _emit(out)
    return 0


def cmd_stable(args) -> int:
    name, Gp, M = _load(args)
    F = build_fusion(Gp.full, args.prime)
    st = stable_subspace(F, M, args.degree, args.collection, full_pairs=args.family_oracle)
    out = {"degree": st.degree, "dim": st.dim, "ambient_dim": st.ambient_dim, "family": st.family,
           "conditions": st.conditions}
    if args.basis:
        out["basis"] = st.basis.tolist()
    _emit(out)
    return 0


def cmd_check(args) -> int:
    spec = CheckSpec(args.name, args.group, args.prime, args.module or "trivial",
                     args.max_degree, args.collection)
    report = run_check(args.name, spec, timings=args.timings)
    print(report.to_json())
    return report.exit_code


def cmd_suite(args) -> int:
    result = run_suite(args.manifest, timings=args.timings)
    _emit(result)
    print(suite_summary(result), file=sys.stderr)
    return result["exit_code"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fusionlab")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, module=True):
        p.add_argument("--group", required=True, help="JSON file or builtin name (S3, S4, A4, D8, ...)")
        p.add_argument("--prime", type=int, required=True)
        if module:
            p.add_argument("--module", default=None, help="JSON file, or trivial / sign / twisted")

    p = sub.add_parser("classify", help="classify subgroups of S up to F-conjugacy")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("cohomology", help="dimensions of H^n(G, M)")
    common(p)
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--method", choices=("resolution", "bar"), default="resolution")
    p.add_argument("--representatives", action="store_true")
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("nerve", help="cohomology of a transporter or linking category")
    common(p)
    p.add_argument("--collection", default="cr",
                   choices=("centric", "cr", "constrained", "quasicentric"))
    p.add_argument("--kind", choices=("transporter", "linking"), default="transporter")
    p.add_argument("--max-degree", type=int, default=2)
    p.set_defaults(func=cmd_nerve)

    p = sub.add_parser("stable", help="stable elements in H^n(S, M)")
    common(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--collection", default="centric", choices=("centric", "all", "grodal", "cr"))
    p.add_argument("--family-oracle", action="store_true", help="impose every (P, g) pair")
    p.add_argument("--basis", action="store_true")
    p.set_defaults(func=cmd_stable)

    p = sub.add_parser("check", help="run one named check")
    p.add_argument("name", choices=CHECKS)
    common(p)
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--collection", default="centric")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("suite", help="run a manifest of checks")
    p.add_argument("--manifest", required=True, help="JSON file or builtin name (acceptance)")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FusionLabError, KeyError, ValueError, FileNotFoundError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
