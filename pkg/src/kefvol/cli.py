"""Command-line interface.

Exit codes: 0 success, 1 computation error (structured JSON message on
stderr), 2 usage error (bad arguments or malformed input files).
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
import warnings
from fractions import Fraction

from . import __version__
from .errors import KefvolError, NotFlaggedSemistable, SchemaError, TerminalPoint, UnresolvedReference
from .exact.rational import fmt
from .fano import (
    anticanonical_volume,
    beta_invariant,
    marked_point,
    marked_points,
    projective_space,
    quotient_pn,
    quotient_point,
    seshadri_constant,
    singular_points,
    toric_polytope,
    volume_samples,
    weighted_projective,
)
from .molien import du_val_group, molien_coefficients, molien_coefficients_direct
from .monomial import ToricSingularity, ideal_power, lct_monomial, maximal_ideal, mult_monomial
from .runner import dumps_report, report_passed, run_corpus
from .schema import (
    parse_corpus,
    parse_ideal_file,
    parse_ideal_on,
    parse_model,
    parse_rat,
    parse_singularity,
)
from .valuation import MonomialValuation, hvol, hvol_minimize, realization_level
from .verify import (
    duval_classify,
    verify_main1,
    verify_main2,
    verify_nonterm,
    verify_quot_bound,
)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- argument helpers


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _vector(text):
    try:
        return tuple(parse_rat(x.strip()) for x in text.split(","))
    except SchemaError as exc:
        raise UsageError(f"bad vector {text!r}: {exc}") from exc


_PN = re.compile(r"^P\^?(\d+)$")
_WP = re.compile(r"^P\(([\d,\s]+)\)$")
_QUOT = re.compile(r"^P\^?(\d+)/(\w+)$")
_CN = re.compile(r"^C\^?(\d+)$")
_CYC = re.compile(r"^1/(\d+)\(([\d,\s]+)\)$")


def parse_model_arg(text):
    """P^n, P(q0,...,qn), P1xP1, P^2/<ADE label>, or a JSON model file."""
    m = _PN.match(text)
    if m:
        return projective_space(int(m.group(1)))
    m = _WP.match(text)
    if m:
        return weighted_projective([int(x) for x in m.group(1).split(",")])
    if text in ("P1xP1", "P1xP1xP1"):
        n = text.count("P")
        verts = [tuple(2 * ((i >> j) & 1) for j in range(n)) for i in range(2 ** n)]
        return toric_polytope(verts, kss_flag=True, label=text)
    m = _QUOT.match(text)
    if m:
        G = du_val_group(m.group(2))
        if G.n != int(m.group(1)):
            raise UsageError(f"{m.group(2)} acts on C^{G.n}, not C^{m.group(1)}")
        return quotient_pn(G)
    if text.endswith(".json"):
        model, _ = parse_model(_load_json(text))
        return model
    raise UsageError(f"unrecognized model {text!r}")


def parse_singularity_arg(text):
    """C^n, 1/r(a,...), or a JSON singularity file."""
    m = _CN.match(text)
    if m:
        return ToricSingularity.smooth(int(m.group(1)))
    m = _CYC.match(text)
    if m:
        return ToricSingularity.cyclic_quotient(int(m.group(1)), [int(x) for x in m.group(2).split(",")])
    if text.endswith(".json"):
        d = _load_json(text)
        return parse_singularity(d.get("singularity", d) if isinstance(d, dict) else d)[0]
    raise UsageError(f"unrecognized singularity {text!r}")


def _marked(model, point):
    if point is None or point == "first":
        return marked_points(model)[0]
    if point == "singular":
        pts = singular_points(model)
        if not pts:
            raise UsageError(f"{model.label} has no singular torus-fixed point")
        return pts[0]
    if point == "quotient":
        return quotient_point(model)
    return marked_point(model, _vector(point))


def _point_ideal(mp, args):
    if args.ideal:
        d = _load_json(args.ideal)
        body = {k: v for k, v in d.items() if k in ("generators", "maximal", "power")}
        a, _ = parse_ideal_on(mp.local, body)
    else:
        a = maximal_ideal(mp.local)
    if args.power and args.power > 1:
        a = ideal_power(a, args.power)
    return a


def _xs(top):
    return [Fraction(top) * k / 100 for k in range(101)]


# ---------------------------------------------------------------- subcommands


def cmd_lct(args):
    print(fmt(lct_monomial(parse_ideal_file(_load_json(args.ideal)))))


def cmd_mult(args):
    print(fmt(mult_monomial(parse_ideal_file(_load_json(args.ideal)))))


def cmd_hvol(args):
    s = parse_singularity_arg(args.singularity)
    print(fmt(hvol(MonomialValuation(s, _vector(args.weight)))))


def cmd_hvol_min(args):
    s = parse_singularity_arg(args.singularity)
    res = hvol_minimize(s, tol=args.tol)
    out = {
        "value": res.value,
        "certificate_gap": res.certificate_gap,
        "iterations": res.iterations,
        "minimizer": list(res.minimizer),
    }
    if res.snapped is not None:
        out["snapped"] = [fmt(x) for x in res.snapped.weight]
        out["exact_value"] = fmt(res.exact_value)
        out["realization_level"] = realization_level(res.snapped)
    print(json.dumps(out, indent=2))


def cmd_molien(args):
    G = du_val_group(args.group)
    series = (molien_coefficients_direct if args.direct else molien_coefficients)(G, args.max_degree)
    print(" ".join(str(c) for c in series.coeffs))


def _write_csv(path, mp, a, top):
    rows = volume_samples(mp, a, _xs(top))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "volume", "lower_bound"])
        for x, v, lb in rows:
            w.writerow([fmt(x), fmt(v), fmt(max(lb, Fraction(0)))])


def cmd_seshadri(args):
    mp = _marked(parse_model_arg(args.model), args.point)
    a = _point_ideal(mp, args)
    eps = seshadri_constant(mp, a)
    if args.csv:
        _write_csv(args.csv, mp, a, 2 * max(eps, Fraction(1)))
    print(fmt(eps))


def cmd_beta(args):
    mp = _marked(parse_model_arg(args.model), args.point)
    a = _point_ideal(mp, args)
    b = beta_invariant(mp, a)
    if args.csv:
        _write_csv(args.csv, mp, a, 2 * max(seshadri_constant(mp, a), Fraction(1)))
    print(fmt(b))


def cmd_verify(args):
    model = parse_model_arg(args.model)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotFlaggedSemistable)
        if args.theorem == "main1":
            mp = _marked(model, args.point)
            case = verify_main1(mp, _point_ideal(mp, args))
        elif args.theorem == "main2":
            if not args.weight:
                raise UsageError("main2 needs --weight")
            mp = _marked(model, args.point)
            case = verify_main2(mp, MonomialValuation(mp.local, _vector(args.weight)))
        elif args.theorem == "quot":
            mp = _marked(model, args.point) if args.point else None
            case = verify_quot_bound(model, mp)
        else:
            point = args.point or ("singular" if singular_points(model) else "first")
            try:
                case = verify_nonterm(_marked(model, point))
            except TerminalPoint as exc:
                print(json.dumps({"id": "nonterm", "status": "not_applicable", "reason": str(exc)}, indent=2))
                return 0
    r = case.result
    print(json.dumps({
        "id": case.id,
        "lhs": fmt(r.lhs),
        "rhs": fmt(r.rhs),
        "holds": r.holds,
        "equality": r.equality,
        "flagged": case.flagged,
        "notes": case.notes,
        "anticanonical_volume": fmt(anticanonical_volume(model)),
    }, indent=2))
    return 1 if case.violated else 0


def cmd_classify(args):
    ok, reason = duval_classify(args.degree, args.sings)
    print("admissible" if ok else "not admissible")
    if args.verbose:
        print(reason)


def cmd_corpus(args):
    corpus = parse_corpus(args.path)
    if args.seed is not None:
        corpus = type(corpus)(corpus.models, corpus.singularities, corpus.cases, args.seed, corpus.tol)
    report = run_corpus(corpus, jobs=args.jobs)
    text = dumps_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    s = report["summary"]
    print(f"{s['total']} cases: {s['ok']} ok, {s['not_applicable']} not applicable, "
          f"{s['errors']} errors, {s['violations']} violations, "
          f"{s['unflagged_failures']} unflagged failures", file=sys.stderr)
    return 0 if report_passed(report) else 1


# ---------------------------------------------------------------- parser


def _add_point_args(p):
    p.add_argument("--model", required=True, help="P^n, P(q0,..,qn), P1xP1, P^2/<ADE> or a JSON model file")
    p.add_argument("--point", help="vertex 'y1,y2,..', 'first', 'singular' or 'quotient'")
    p.add_argument("--ideal", help="JSON file with generators on the local chart (default: maximal ideal)")
    p.add_argument("--power", type=int, default=1, help="raise the ideal to this power")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kefvol", description="Exact local invariants and volume bounds.")
    ap.add_argument("--version", action="version", version=f"kefvol {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, what in (("lct", cmd_lct, "log canonical threshold"), ("mult", cmd_mult, "multiplicity")):
        p = sub.add_parser(name, help=f"{what} of a monomial ideal")
        p.add_argument("--ideal", required=True, help="JSON ideal file")
        p.set_defaults(func=fn)

    p = sub.add_parser("hvol", help="normalized volume of a monomial valuation")
    p.add_argument("--singularity", required=True, help="C^n, 1/r(a,..) or a JSON file")
    p.add_argument("--weight", required=True, help="comma-separated rationals")
    p.set_defaults(func=cmd_hvol)

    p = sub.add_parser("hvol-min", help="minimize hvol over monomial valuations")
    p.add_argument("--singularity", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_hvol_min)

    p = sub.add_parser("molien", help="Molien series coefficients of a Du Val group")
    p.add_argument("--group", required=True, help="A_k, D_k, E6, E7 or E8")
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--direct", action="store_true", help="per-element series instead of the common denominator")
    p.set_defaults(func=cmd_molien)

    for name, fn in (("seshadri", cmd_seshadri), ("beta", cmd_beta)):
        p = sub.add_parser(name, help=f"{name} invariant at a torus-fixed point")
        _add_point_args(p)
        p.add_argument("--csv", help="write volume-function samples to this CSV file")
        p.set_defaults(func=fn)

    p = sub.add_parser("verify", help="check one volume bound")
    p.add_argument("--theorem", required=True, choices=["main1", "main2", "quot", "nonterm"])
    _add_point_args(p)
    p.add_argument("--weight", help="valuation weight for main2")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="Du Val singularities admissible in a given degree")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--sings", nargs="*", default=[], help="ADE labels")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("corpus", help="run a corpus file and write a report")
    p.add_argument("path")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: logical cores)")
    p.add_argument("--seed", type=int, default=None, help="override the corpus seed")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", None) is not None and args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        rc = args.func(args)
    except (UsageError, SchemaError, UnresolvedReference, ValueError) as exc:
        print(f"kefvol {args.command}: {exc}", file=sys.stderr)
        return 2
    except KefvolError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "command": args.command}),
              file=sys.stderr)
        return 1
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
