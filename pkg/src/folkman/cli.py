"""Command-line interface.

Exit codes: 0 positive verdict, 1 negative verdict, 2 usage or input error,
3 indeterminate (budget exhausted or uncertified comparison).

Every run writes one manifest (argv, parameters, seed, version, input
digests, output paths, report digest).  ``replay`` re-runs a manifest and
checks the report digest, ignoring wall-clock fields.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arrowing import ArrowCertificate, EdgeColoring, Outcome, arrows, is_folkman
from .bounds import (
    check_chain,
    derive_params,
    ramsey_lower_product,
    ramsey_upper_skolem,
    recheck_report,
)
from .dense import (
    CanonicalSequence,
    DichotomySummary,
    canonical_sequence,
    dichotomy_exhaustive,
    dichotomy_sampled,
    mono_clique_from_canonical,
)
from .experiments import EXPERIMENTS, run_experiment
from .graph import GraphFormatError, from_graph6, read_graph, sample_gnp
from .hypergraph import (
    MAX_MATERIALIZED_N,
    build_clique_hypergraph,
    codegree_clique_closed_form,
    codegree_function,
    delta_nk,
)
from .logint import DomainError, LogInterval, Verdict, certify_le

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INDETERMINATE = 0, 1, 2, 3

# known two-colour values used to seed the product lower bound
PRODUCT_BASE = {3: {1: 3, 2: 6, 3: 17}, 4: {1: 4, 2: 18}}

_TIMING_KEYS = {"runtime_ms", "wall_time", "search_ms"}


@dataclass
class RunManifest:
    subcommand: str
    argv: list[str]
    params: dict
    seed: int | None
    version: str = __version__
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    report_sha256: str = ""
    exit_code: int = 0

    def to_json(self) -> dict:
        return asdict(self)


def _sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k not in _TIMING_KEYS}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


def _clean(obj):
    # JSON has no NaN/inf
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def report_digest(report) -> str:
    text = json.dumps(_strip_timing(_clean(report)), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _verdict_code(v: Verdict) -> int:
    return {Verdict.CERTIFIED_TRUE: EXIT_OK, Verdict.CERTIFIED_FALSE: EXIT_NEGATIVE}.get(v, EXIT_INDETERMINATE)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


# subcommands -------------------------------------------------------------------


def cmd_arrow(args, inputs):
    g = read_graph(args.graph)
    inputs[args.graph] = _sha256_file(args.graph)
    mode = "parallel" if args.mode == "par" else "deterministic"
    cert = arrows(g, args.k, args.r, mode=mode, node_budget=args.budget, time_budget=args.time_budget, n_jobs=args.jobs)
    code = {Outcome.ARROWS: EXIT_OK, Outcome.NON_ARROWING: EXIT_NEGATIVE}.get(cert.verdict, EXIT_INDETERMINATE)
    return cert.to_json(), code


def cmd_folkman(args, inputs):
    g = read_graph(args.graph)
    inputs[args.graph] = _sha256_file(args.graph)
    mode = "parallel" if args.mode == "par" else "deterministic"
    bundle = is_folkman(g, args.k, args.r, l=args.l, mode=mode, node_budget=args.budget)
    code = {True: EXIT_OK, False: EXIT_NEGATIVE, None: EXIT_INDETERMINATE}[bundle.holds]
    return bundle.to_json(), code


def _ramsey_value(choice: str, k: int, r: int) -> LogInterval:
    if choice == "skolem":
        return ramsey_upper_skolem(k, r)
    if choice == "product":
        if k not in PRODUCT_BASE:
            raise ValueError(f"no base values for the product bound at k={k}")
        return ramsey_lower_product(k, r, PRODUCT_BASE[k])
    if choice.startswith("value:"):
        return LogInterval.exact(int(choice.split(":", 1)[1]))
    raise ValueError("--R must be skolem, product or value:N")


def cmd_bounds(args, inputs):
    ks = range(3, 7) if args.R != "product" else sorted(PRODUCT_BASE)
    cells = [(k, r) for k in ks for r in range(2, 5)] if args.grid else [(args.k, args.r)]
    reports = []
    for k, r in cells:
        R = _ramsey_value(args.R, k, r)
        ps = derive_params(k, r, R, log2n=Fraction(args.log2n) if args.log2n is not None else None)
        reports.append(check_chain(ps))
    if all(rep.all_true for rep in reports):
        code = EXIT_OK
    elif any(rep.any_false for rep in reports):
        code = EXIT_NEGATIVE
    else:
        code = EXIT_INDETERMINATE
    body = [rep.to_json() for rep in reports]
    return (body[0] if not args.grid else {"grid": body}), code


def cmd_codegree(args, inputs):
    exact = args.exact or (not args.closed_form and args.n <= MAX_MATERIALIZED_N)
    if exact:
        H = build_clique_hypergraph(args.n, args.k)
        value = codegree_function(H, args.tau, drop_factor=args.drop_factor)
    else:
        value = codegree_clique_closed_form(args.n, args.k, args.tau, drop_factor=args.drop_factor)
    bound = delta_nk(args.n, args.k, args.tau)
    verdict, margin = certify_le(value, bound)
    body = {
        "n": args.n,
        "k": args.k,
        "tau": str(args.tau),
        "method": "exact" if exact else "closed-form",
        "drop_factor": args.drop_factor,
        "codegree_log2": list(value.log2_bounds()),
        "delta_nk_log2": list(bound.log2_bounds()),
        "verdict": verdict.value,
        "margin": margin,
    }
    return body, _verdict_code(verdict)


def cmd_dichotomy(args, inputs):
    if args.samples is not None:
        s: DichotomySummary = dichotomy_sampled(args.n, args.k, args.r, args.R, args.samples, args.seed)
    else:
        s = dichotomy_exhaustive(args.n, args.k, args.r, args.R)
    return s.to_json(), EXIT_OK if s.neither == 0 else EXIT_NEGATIVE


def _read_coloring(path, graph) -> EdgeColoring:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [int(x) for x in text.split()]
    if isinstance(data, dict):
        colors, r = data["colors"], data.get("r", 2)
    else:
        colors, r = data, 2
    return EdgeColoring(graph, tuple(int(c) for c in colors), int(r))


def cmd_canonical(args, inputs):
    g = read_graph(args.graph)
    inputs[args.graph] = _sha256_file(args.graph)
    inputs[args.coloring] = _sha256_file(args.coloring)
    col = _read_coloring(args.coloring, g)
    res = canonical_sequence(col, args.ell, args.d)
    body = {
        "host": g.to_graph6(),
        "coloring": list(col.colors),
        "ell": args.ell,
        "d": str(args.d),
        "ok": res.ok,
        "failed_level": res.failed_level,
        "reason": res.reason,
        "levels": [asdict(lv) for lv in res.levels],
        "sequence": None,
        "mono_clique": None,
    }
    if res.ok:
        body["sequence"] = {"vertices": list(res.sequence.vertices), "forward_colors": list(res.sequence.forward_colors)}
        if args.ell % 2 == 0 and args.ell >= 4:
            c, verts = mono_clique_from_canonical(res.sequence, col, args.ell // 2 + 1)
            body["mono_clique"] = {"color": c, "vertices": list(verts)}
    return body, EXIT_OK if res.ok else EXIT_NEGATIVE


def cmd_sample(args, inputs):
    lines = [sample_gnp(args.n, args.p, args.seed, stream=i).to_graph6() for i in range(args.count)]
    return {"n": args.n, "p": args.p, "seed": args.seed, "graph6": lines}, EXIT_OK


def cmd_experiment(args, inputs):
    res = run_experiment(args.name, args.seed)
    return res, EXIT_OK if res["passed"] else EXIT_NEGATIVE


def _verify_payload(data: dict) -> bool:
    if "items" in data:
        return recheck_report(data)
    if "grid" in data:
        return all(recheck_report(d) for d in data["grid"])
    if "arrowing" in data:
        g = from_graph6(data["host"])
        cert = ArrowCertificate.from_json(data["arrowing"])
        clique = data["clique"]
        if clique["present"]:
            w = clique["witness"]
            return w is not None and len(w) == data["l"] and g.is_clique(w)
        return cert.recheck() and cert.graph == g and not g.has_clique(data["l"])
    if "verdict" in data and "host" in data:
        return ArrowCertificate.from_json(data).recheck()
    if "sequence" in data and "coloring" in data:
        if not data["ok"]:
            return True
        g = from_graph6(data["host"])
        col = EdgeColoring(g, tuple(data["coloring"]), 2)
        seq = CanonicalSequence(tuple(data["sequence"]["vertices"]), tuple(data["sequence"]["forward_colors"]))
        if not seq.verify(col):
            return False
        mc = data.get("mono_clique")
        if mc:
            verts = mc["vertices"]
            return g.is_clique(verts) and all(col.color(u, v) == mc["color"] for i, u in enumerate(verts) for v in verts[i + 1 :])
        return True
    raise ValueError("unrecognised certificate")


def cmd_verify(args, inputs):
    inputs[args.certificate] = _sha256_file(args.certificate)
    data = json.loads(Path(args.certificate).read_text())
    ok = _verify_payload(data)
    return {"certificate": args.certificate, "valid": ok}, EXIT_OK if ok else EXIT_NEGATIVE


def cmd_replay(args, inputs):
    inputs[args.manifest] = _sha256_file(args.manifest)
    manifest = json.loads(Path(args.manifest).read_text())
    argv = list(manifest["argv"])
    # drop output options so the replay does not overwrite the original artifacts
    stripped = []
    skip = False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in ("--out", "--manifest"):
            skip = True
            continue
        if a.startswith("--out=") or a.startswith("--manifest="):
            continue
        stripped.append(a)
    parser = build_parser()
    sub = parser.parse_args(stripped)
    report, code = sub.func(sub, {})
    digest = report_digest(report)
    same = digest == manifest["report_sha256"] and code == manifest["exit_code"]
    body = {"manifest": args.manifest, "expected": manifest["report_sha256"], "actual": digest, "reproduced": same}
    return body, EXIT_OK if same else EXIT_NEGATIVE


# parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="folkman", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--out", help="write the JSON report here instead of stdout")
    ap.add_argument("--manifest", help="manifest path (default: <out>.manifest.json, or stderr)")
    sp = ap.add_subparsers(dest="command", required=True)

    p = sp.add_parser("arrow", help="decide G -> (K_k)_r")
    p.add_argument("--graph", required=True, help="graph6 or edge-list file")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-r", type=int, required=True)
    p.add_argument("--mode", choices=["det", "par"], default="det")
    p.add_argument("--budget", type=int, default=None, help="node budget (default: $FOLKMAN_NODE_BUDGET or none)")
    p.add_argument("--time-budget", type=float, default=None, help="seconds")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_arrow)

    p = sp.add_parser("folkman", help="arrowing plus K_l-freeness")
    p.add_argument("--graph", required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-r", type=int, required=True)
    p.add_argument("-l", type=int, default=None, help="forbidden clique size (default k+1)")
    p.add_argument("--mode", choices=["det", "par"], default="det")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_folkman)

    p = sp.add_parser("bounds", help="certify the inequality chain")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--R", default="skolem", help="skolem | product | value:N")
    p.add_argument("--log2n", type=_fraction, default=None, help="use n = 2^X instead of the threshold")
    p.add_argument("--grid", action="store_true", help="all k in 3..6, r in 2..4")
    p.set_defaults(func=cmd_bounds)

    p = sp.add_parser("codegree", help="co-degree function of H(n,k) against delta(n,k,tau)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tau", type=_fraction, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="materialize H(n,k) and count degrees")
    g.add_argument("--closed-form", action="store_true", help="use binom(n-l_j, k-l_j) degrees")
    p.add_argument("--drop-factor", action="store_true", help="omit the 2^binom(j-1,2) divisor")
    p.set_defaults(func=cmd_codegree)

    p = sp.add_parser("dichotomy", help="check the colouring dichotomy on K_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--R", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true", help="all colourings (default)")
    g.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_dichotomy)

    p = sp.add_parser("canonical", help="greedy canonical sequence and its monochromatic clique")
    p.add_argument("--graph", required=True)
    p.add_argument("--coloring", required=True, help='JSON {"colors": [...]} or whitespace-separated colours')
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--d", type=_fraction, required=True)
    p.set_defaults(func=cmd_canonical)

    p = sp.add_parser("sample", help="seeded G(n,p) samples as graph6")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.set_defaults(func=cmd_sample)

    p = sp.add_parser("experiment", help="named acceptance experiments")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_experiment)

    p = sp.add_parser("verify", help="re-check a certificate or report without searching")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sp.add_parser("replay", help="re-run a manifest and compare report digests")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs: dict[str, str] = {}
    try:
        report, code = args.func(args, inputs)
    except (GraphFormatError, DomainError, ValueError, KeyError, OSError) as exc:
        print(f"folkman {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = _clean(report)
    text = json.dumps(report, indent=2, sort_keys=True)
    params = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in vars(args).items() if k not in ("func", "out", "manifest")}
    manifest = RunManifest(
        subcommand=args.command,
        argv=argv,
        params=params,
        seed=getattr(args, "seed", None),
        inputs=inputs,
        report_sha256=report_digest(report),
        exit_code=code,
    )
    if args.out:
        Path(args.out).write_text(text + "\n")
        manifest.outputs["report"] = args.out
    else:
        print(text)
    mpath = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if mpath:
        manifest.outputs["manifest"] = mpath
        Path(mpath).write_text(json.dumps(manifest.to_json(), indent=2, sort_keys=True) + "\n")
    else:
        print(json.dumps(manifest.to_json(), sort_keys=True), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
