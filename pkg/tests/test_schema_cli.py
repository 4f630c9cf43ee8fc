from __future__ import annotations

import copy
import json
from fractions import Fraction
from pathlib import Path

import pytest

from kefvol.cli import main
from kefvol.errors import SchemaError, UnresolvedReference
from kefvol.runner import case_seed, dumps_report, report_passed, run_corpus
from kefvol.schema import (
    corpus_from_json,
    digest,
    parse_corpus,
    parse_ideal_file,
    parse_model,
    parse_rat,
    parse_singularity,
    serialize_corpus,
)

F = Fraction
ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "data" / "corpus.json"
CUSP = ROOT / "data" / "cusp.json"


def run(argv, capsys):
    rc = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return rc, out, err


def small_corpus():
    return {
        "schema": "kefvol/1",
        "seed": 5,
        "models": [{"id": "P2", "kind": "projective_space", "n": 2, "kss_flag": True},
                   {"id": "P112", "kind": "weighted_projective", "weights": [1, 1, 2], "kss_flag": False}],
        "singularities": [{"id": "C2", "kind": "smooth", "n": 2}],
        "cases": [
            {"name": "m1", "theorem": "thm_main1", "model": "P2"},
            {"name": "nt", "theorem": "nonterm", "model": "P2", "point": "first"},
            {"name": "w", "theorem": "thm_main2", "model": "P112", "point": "singular", "weight": ["0", "-1"]},
            {"name": "d", "theorem": "dfem", "singularity": "C2", "ideal": {"generators": [[2, 0], [0, 3]]}},
            {"name": "c", "theorem": "compare2", "singularity": "C2", "budget": 5},
        ],
    }


# ---------------------------------------------------------------- scalars and records


def test_parse_rat():
    assert parse_rat("3/6") == F(1, 2)
    assert parse_rat(-4) == -4
    assert parse_rat("-7") == -7


@pytest.mark.parametrize("bad", [0.5, "0.5", "1e3", True, None, "1/0", "a/b"])
def test_parse_rat_rejects_inexact(bad):
    with pytest.raises(SchemaError):
        parse_rat(bad)


def test_schema_error_carries_pointer():
    d = {"schema": "kefvol/1", "singularity": {"kind": "smooth", "n": 2}, "generators": [["2", "0"], [0, 1.5]]}
    with pytest.raises(SchemaError) as info:
        parse_ideal_file(d)
    assert info.value.pointer == "/generators/1/1"


def test_wrong_schema_tag():
    with pytest.raises(SchemaError):
        parse_ideal_file({"schema": "kefvol/2", "singularity": {"kind": "smooth", "n": 2}, "maximal": True})


def test_ideal_file():
    a = parse_ideal_file(json.loads(CUSP.read_text()))
    assert len(a.generators) == 2


def test_singularity_records_are_canonical():
    s1, r1 = parse_singularity({"kind": "cyclic_quotient", "r": 3, "weights": [1, 2]})
    s2, r2 = parse_singularity({"kind": "cyclic_quotient", "r": 3, "weights": [1, 2], "label": "A2"})
    # labels are display data: equal germs, distinct records
    assert s1 == s2
    assert digest(r1) != digest(r2)


def test_model_errors():
    with pytest.raises(SchemaError) as info:
        parse_model({"kind": "banana"}, ("models", 3))
    assert info.value.pointer == "/models/3/kind"
    with pytest.raises(SchemaError):
        parse_model({"kind": "weighted_projective", "weights": [2, 4, 6]})
    with pytest.raises(SchemaError):
        parse_model({"kind": "quotient_pn", "group": "F4"})


def test_quotient_model_default_flag():
    m, rec = parse_model({"kind": "quotient_pn", "group": "A2"})
    assert m.kss_flag and rec["kss_flag"] is True
    m, rec = parse_model({"kind": "quotient_pn", "group": "A1"})
    assert not m.kss_flag


# ---------------------------------------------------------------- corpus


def test_corpus_round_trip():
    c = parse_corpus(CORPUS)
    again = corpus_from_json(json.loads(serialize_corpus(c)))
    assert again.digest == c.digest
    assert serialize_corpus(again) == serialize_corpus(c)


def test_corpus_digest_ignores_formatting():
    d = small_corpus()
    e = copy.deepcopy(d)
    e["cases"][3]["ideal"]["generators"] = [["2", "0"], ["0", "6/2"]]
    assert corpus_from_json(d).digest == corpus_from_json(e).digest
    e["seed"] = 6
    assert corpus_from_json(d).digest != corpus_from_json(e).digest


def test_corpus_reference_errors():
    d = small_corpus()
    d["cases"][0]["model"] = "P9"
    with pytest.raises(UnresolvedReference):
        corpus_from_json(d)
    d = small_corpus()
    d["models"].append({"id": "P2", "kind": "projective_space", "n": 2})
    with pytest.raises(SchemaError) as info:
        corpus_from_json(d)
    assert info.value.pointer == "/models/2/id"
    d = small_corpus()
    d["cases"].append(dict(d["cases"][0]))
    with pytest.raises(SchemaError):
        corpus_from_json(d)


@pytest.mark.parametrize("mutate,pointer", [
    (lambda d: d["cases"][0].update(theorem="thm_main9"), "/cases/0/theorem"),
    (lambda d: d["cases"][0].update(extra=1), "/cases/0"),
    (lambda d: d["cases"][2].update(weight=["0", 0.5]), "/cases/2/weight/1"),
    (lambda d: d.update(tol=0), "/tol"),
    (lambda d: d["cases"][3].pop("ideal"), "/cases/3"),
])
def test_corpus_schema_errors(mutate, pointer):
    d = small_corpus()
    mutate(d)
    with pytest.raises(SchemaError) as info:
        corpus_from_json(d)
    assert info.value.pointer == pointer


# ---------------------------------------------------------------- runner


def test_runner_statuses():
    report = run_corpus(corpus_from_json(small_corpus()), jobs=1)
    status = {c["name"]: c for c in report["cases"]}
    assert status["m1"]["status"] == "ok" and status["m1"]["equality"]
    assert status["nt"]["status"] == "not_applicable"
    assert status["w"]["status"] == "ok" and not status["w"]["holds"] and not status["w"]["violated"]
    assert status["d"]["lhs"] == "25/6"
    s = report["summary"]
    assert (s["total"], s["not_applicable"], s["errors"], s["violations"], s["unflagged_failures"]) == (5, 1, 0, 0, 1)
    assert report_passed(report)


def test_runner_reports_errors_without_stopping():
    d = small_corpus()
    d["cases"].append({"name": "bad", "theorem": "thm_main1", "model": "P2", "point": ["5", "5"]})
    report = run_corpus(corpus_from_json(d), jobs=1)
    bad = report["cases"][-1]
    assert bad["status"] == "error" and "PointMismatch" in bad["error"]
    assert not report_passed(report)


def test_case_seed_is_stable():
    assert case_seed(0, "x") == case_seed(0, "x")
    assert case_seed(0, "x") != case_seed(1, "x") != case_seed(0, "y")
    assert 0 <= case_seed(123, "compare/C2") < 2 ** 64


def test_report_order_is_request_order():
    c = corpus_from_json(small_corpus())
    a = run_corpus(c, jobs=1)
    b = run_corpus(c, jobs=3)
    assert [x["name"] for x in a["cases"]] == [r.name for r in c.cases]
    a.pop("timing"), b.pop("timing")
    assert dumps_report(a) == dumps_report(b)


# ---------------------------------------------------------------- CLI


def test_cli_lct_and_mult(capsys):
    assert run(["lct", "--ideal", CUSP], capsys)[:2] == (0, "5/6\n")
    assert run(["mult", "--ideal", CUSP], capsys)[:2] == (0, "6\n")


def test_cli_hvol(capsys):
    assert run(["hvol", "--singularity", "C^2", "--weight", "1,2"], capsys)[:2] == (0, "9/2\n")
    assert run(["hvol", "--singularity", "1/3(1,2)", "--weight", "1,1"], capsys)[:2] == (0, "4/3\n")


def test_cli_hvol_min(capsys):
    rc, out, _ = run(["hvol-min", "--singularity", "1/5(1,2)"], capsys)
    assert rc == 0
    d = json.loads(out)
    assert d["exact_value"] == "4/5"
    assert d["value"] == pytest.approx(0.8, rel=1e-9)


def test_cli_molien(capsys):
    rc, out, _ = run(["molien", "--group", "A2", "--max-degree", "6"], capsys)
    assert rc == 0
    direct = run(["molien", "--group", "A2", "--max-degree", "6", "--direct"], capsys)[1]
    assert out == direct
    # invariants of 1/3(1,2): 1; xy; x^3, y^3, ...
    assert [int(c) for c in out.split()] == [1, 0, 1, 2, 1, 2, 3]


def test_cli_classify(capsys):
    assert run(["classify", "--degree", "1", "--sings", "A8"], capsys)[:2] == (0, "not admissible\n")
    rc, out, _ = run(["classify", "--degree", "2", "--sings", "A3", "A1", "--verbose"], capsys)
    assert rc == 0 and out.startswith("admissible\n")
    rc, _, err = run(["classify", "--degree", "11"], capsys)
    assert rc == 1 and json.loads(err)["error"] == "DegreeOutOfRange"


def test_cli_seshadri_and_beta(capsys, tmp_path):
    assert run(["seshadri", "--model", "P^2"], capsys)[:2] == (0, "3\n")
    assert run(["seshadri", "--model", "P^2", "--power", "2"], capsys)[:2] == (0, "3/2\n")
    assert run(["seshadri", "--model", "P1xP1", "--point=-1,-1"], capsys)[:2] == (0, "2\n")
    csv_path = tmp_path / "vol.csv"
    assert run(["beta", "--model", "P1xP1", "--csv", csv_path], capsys)[:2] == (0, "0\n")
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "x,volume,lower_bound" and rows[1] == "0,8,8" and len(rows) == 102


def test_cli_verify(capsys):
    rc, out, _ = run(["verify", "--theorem", "main1", "--model", "P^2"], capsys)
    d = json.loads(out)
    assert rc == 0 and d["lhs"] == d["rhs"] == "9" and d["equality"]
    rc, out, _ = run(["verify", "--theorem", "main2", "--model", "P^2/A2", "--point", "quotient",
                      "--weight", "1,1"], capsys)
    assert rc == 0 and json.loads(out)["rhs"] == "3"
    rc, out, _ = run(["verify", "--theorem", "quot", "--model", "P^2/A2"], capsys)
    assert rc == 0 and json.loads(out)["equality"]
    rc, out, _ = run(["verify", "--theorem", "nonterm", "--model", "P^2"], capsys)
    assert rc == 0 and json.loads(out)["status"] == "not_applicable"
    # unflagged failure: reported, not a violation
    rc, out, _ = run(["verify", "--theorem", "nonterm", "--model", "P(1,1,2)"], capsys)
    d = json.loads(out)
    assert rc == 0 and not d["holds"] and not d["flagged"]


def test_cli_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 2
    rc, _, err = run(["lct", "--ideal", "/nonexistent/ideal.json"], capsys)
    assert rc == 2 and "cannot read" in err
    rc, _, _ = run(["seshadri", "--model", "Q^7"], capsys)
    assert rc == 2
    with pytest.raises(SystemExit) as info:
        main(["corpus", str(CORPUS), "--jobs", "0"])
    assert info.value.code == 2


def test_cli_bad_ideal_file(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"singularity": {"kind": "smooth", "n": 2}, "generators": [[0.5, 1]]}))
    rc, _, err = run(["lct", "--ideal", p], capsys)
    assert rc == 2 and "/generators/0/0" in err
    p.write_text("{not json")
    assert run(["mult", "--ideal", p], capsys)[0] == 2


def test_cli_computation_error_is_structured(capsys, tmp_path):
    p = tmp_path / "line.json"
    p.write_text(json.dumps({"singularity": {"kind": "smooth", "n": 2}, "generators": [[1, 1]]}))
    rc, _, err = run(["mult", "--ideal", p], capsys)
    assert rc == 1
    d = json.loads(err)
    assert d["error"] == "InfiniteColength" and d["command"] == "mult"


def test_cli_corpus_is_deterministic(capsys, tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(small_corpus()))
    outs = []
    for k, jobs in enumerate((1, 2)):
        out = tmp_path / f"r{k}.json"
        rc, _, err = run(["corpus", path, "--out", out, "--jobs", jobs], capsys)
        assert rc == 0 and "5 cases" in err
        rep = json.loads(out.read_text())
        rep.pop("timing")
        outs.append(rep)
    assert outs[0] == outs[1]
    assert outs[0]["input_digest"] == corpus_from_json(small_corpus()).digest


def test_cli_corpus_failure_exit(capsys, tmp_path):
    d = small_corpus()
    d["cases"].append({"name": "bad", "theorem": "thm_main1", "model": "P2", "point": ["5", "5"]})
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    rc, out, _ = run(["corpus", path, "--jobs", "1"], capsys)
    assert rc == 1 and json.loads(out)["summary"]["errors"] == 1


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert "kefvol 0.1.0" in capsys.readouterr().out
