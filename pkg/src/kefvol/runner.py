"""Corpus runner: evaluates every case request and assembles the report.

Cases are independent and may run on a process pool; the report is built in
request order, so it does not depend on scheduling.  Only the ``timing``
field varies between runs.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import InvalidModel, KefvolError, NotFlaggedSemistable, TerminalPoint
from .exact.rational import fmt
from .fano import marked_point, marked_points, quotient_point, singular_points
from .monomial import random_ideal
from .schema import SCHEMA, CaseRequest, CorpusFile, corpus_from_json, parse_ideal_on
from .valuation import MonomialValuation
from .verify import (
    TheoremCase,
    compare_infimums,
    cone_dfem,
    verify_dfem,
    verify_main1,
    verify_main2,
    verify_minimizer_realization,
    verify_nonterm,
    verify_quot_bound,
)

DEFAULT_BUDGET = 50


def case_seed(seed: int, name: str) -> int:
    """Per-case seed, stable across platforms and independent of scheduling."""
    h = hashlib.sha256(f"{seed}:{name}".encode("utf-8")).digest()
    return int.from_bytes(h[:8], "big")


def _point(model, spec, default):
    spec = default if spec is None else spec
    if spec == "quotient":
        return quotient_point(model)
    if spec == "singular":
        pts = singular_points(model)
        if not pts:
            raise InvalidModel(f"{model.label} has no singular torus-fixed point")
        return pts[0]
    if spec == "first":
        return marked_points(model)[0]
    return marked_point(model, tuple(Fraction(x) for x in spec))


def _weight(vals):
    return tuple(Fraction(x) for x in vals)


def evaluate(corpus: CorpusFile, req: CaseRequest) -> TheoremCase:
    f = req.fields
    th = req.theorem
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotFlaggedSemistable)
        if th in ("thm_main1", "thm_main2", "nonterm"):
            model = corpus.model(f["model"])
            mp = _point(model, f.get("point"), "singular" if th == "nonterm" else "first")
            if th == "thm_main1":
                a, _ = parse_ideal_on(mp.local, f.get("ideal", "maximal"))
                return verify_main1(mp, a)
            if th == "thm_main2":
                return verify_main2(mp, MonomialValuation(mp.local, _weight(f["weight"])))
            return verify_nonterm(mp)
        if th in ("quotsing", "logdp"):
            model = corpus.model(f["model"])
            mp = _point(model, f["point"], None) if "point" in f else None
            return verify_quot_bound(model, mp)
        s = corpus.singularity(f["singularity"])
        if th == "dfem":
            a, _ = parse_ideal_on(s, f["ideal"])
            return verify_dfem(a)
        if th == "prop_minlctmult":
            return verify_minimizer_realization(MonomialValuation(s, _weight(f["weight"])))
        if th == "cone_dfem":
            ideals = [parse_ideal_on(s, x)[0] for x in f.get("ideals", [])]
            rng = np.random.default_rng(case_seed(corpus.seed, req.name))
            ideals += [random_ideal(s, rng) for _ in range(f.get("random_ideals", 0))]
            return cone_dfem(s, Fraction(f["r"]), Fraction(f["volV"]), ideals, tol=max(corpus.tol, 1e-6))
        if th == "compare2":
            return compare_infimums(s, tol=corpus.tol, budget=f.get("budget", DEFAULT_BUDGET),
                                    seed=case_seed(corpus.seed, req.name) % (2 ** 32))
    raise ValueError(f"unhandled theorem {th}")


def case_record(req: CaseRequest, case: TheoremCase | None, status: str, error: str = "") -> dict:
    rec = {"name": req.name, "theorem": req.theorem, "status": status, "request": req.fields}
    if case is not None:
        r = case.result
        rec.update({
            "id": case.id,
            "inputs": dict(case.inputs),
            "lhs": fmt(r.lhs),
            "rhs": fmt(r.rhs),
            "holds": r.holds,
            "equality": r.equality,
            "flagged": case.flagged,
            "violated": case.violated,
            "notes": case.notes,
            "extras": dict(case.extras),
        })
    if error:
        rec["error"] = error
    return rec


def run_one(corpus: CorpusFile, req: CaseRequest) -> tuple[dict, float]:
    t0 = time.perf_counter()
    try:
        case = evaluate(corpus, req)
        rec = case_record(req, case, "ok")
    except TerminalPoint as exc:
        rec = case_record(req, None, "not_applicable", str(exc))
    except (KefvolError, ValueError) as exc:
        rec = case_record(req, None, "error", f"{type(exc).__name__}: {exc}")
    return rec, time.perf_counter() - t0


_WORKER_CORPUS: CorpusFile | None = None


def _init_worker(corpus_json: str):
    global _WORKER_CORPUS
    _WORKER_CORPUS = corpus_from_json(json.loads(corpus_json))


def _run_index(i: int):
    return run_one(_WORKER_CORPUS, _WORKER_CORPUS.cases[i])


def run_corpus(corpus: CorpusFile, jobs: int | None = None) -> dict:
    """Evaluate all cases; ``jobs`` workers (default: logical cores, 1 = in-process)."""
    jobs = (os.cpu_count() or 1) if jobs is None else max(1, int(jobs))
    n = len(corpus.cases)
    if jobs == 1 or n <= 1:
        results = [run_one(corpus, req) for req in corpus.cases]
    else:
        payload = json.dumps(corpus.to_json())
        with ProcessPoolExecutor(max_workers=min(jobs, n), initializer=_init_worker,
                                 initargs=(payload,)) as pool:
            results = list(pool.map(_run_index, range(n)))
    cases = [r for r, _ in results]
    timing = {req.name: round(t, 6) for req, (_, t) in zip(corpus.cases, results)}
    violations = sum(1 for c in cases if c.get("violated"))
    errors = sum(1 for c in cases if c["status"] == "error")
    return {
        "schema": SCHEMA,
        "version": __version__,
        "input_digest": corpus.digest,
        "seed": corpus.seed,
        "tol": corpus.tol,
        "cases": cases,
        "summary": {
            "total": len(cases),
            "ok": sum(1 for c in cases if c["status"] == "ok"),
            "not_applicable": sum(1 for c in cases if c["status"] == "not_applicable"),
            "errors": errors,
            "violations": violations,
            "unflagged_failures": sum(1 for c in cases if c["status"] == "ok" and not c["holds"]
                                      and not c["flagged"]),
        },
        "timing": timing,
    }


def report_passed(report: dict) -> bool:
    s = report["summary"]
    return s["violations"] == 0 and s["errors"] == 0


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


__all__ = ["case_seed", "dumps_report", "evaluate", "report_passed", "run_corpus", "run_one"]
