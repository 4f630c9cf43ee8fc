"""JSON formats (schema tag "kefvol/1").

Rationals are JSON integers or strings "p" / "p/q"; floats and decimal
strings are rejected with a :class:`SchemaError` that carries a JSON pointer
to the offending value.  Parsed records are normalized to a canonical JSON
form, which is what gets serialized back and hashed for the report digest.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import KefvolError, SchemaError, UnresolvedReference
from .exact.cyclotomic import CycNum
from .exact.lattice import Lattice
from .exact.rational import _RAT_RE, fmt
from .fano import (
    KINDS,
    FanoModel,
    projective_space,
    quotient_pn,
    toric_polytope,
    weighted_projective,
)
from .molien import FiniteMatrixGroup, cyclic_group, du_val_group, group_closure
from .monomial import MonomialIdeal, ToricSingularity, ideal_power, maximal_ideal
from .valuation import MonomialValuation
from .verify import CASE_IDS

SCHEMA = "kefvol/1"


# ---------------------------------------------------------------- scalars


def _ptr(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def parse_rat(x, path=()) -> Fraction:
    if isinstance(x, bool):
        raise SchemaError("expected a rational, got a boolean", _ptr(path))
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        m = _RAT_RE.match(x)
        if m:
            den = int(m.group(2)) if m.group(2) else 1
            if den == 0:
                raise SchemaError("zero denominator", _ptr(path))
            return Fraction(int(m.group(1)), den)
        raise SchemaError(f"not an exact rational literal: {x!r}", _ptr(path))
    if isinstance(x, float):
        raise SchemaError("floats are not allowed in rational slots", _ptr(path))
    raise SchemaError(f"expected a rational, got {type(x).__name__}", _ptr(path))


def parse_int(x, path=(), minimum=None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError("expected an integer", _ptr(path))
    if minimum is not None and x < minimum:
        raise SchemaError(f"expected an integer >= {minimum}", _ptr(path))
    return x


def parse_vec(x, path=()) -> tuple:
    if not isinstance(x, list) or not x:
        raise SchemaError("expected a nonempty list", _ptr(path))
    return tuple(parse_rat(v, path + (i,)) for i, v in enumerate(x))


def parse_vecs(x, path=()) -> tuple:
    if not isinstance(x, list) or not x:
        raise SchemaError("expected a nonempty list of vectors", _ptr(path))
    out = tuple(parse_vec(v, path + (i,)) for i, v in enumerate(x))
    if len({len(v) for v in out}) != 1:
        raise SchemaError("vectors of different lengths", _ptr(path))
    return out


def _expect_dict(x, path):
    if not isinstance(x, dict):
        raise SchemaError("expected an object", _ptr(path))
    return x


def _get(d, key, path, required=True):
    if key not in d:
        if required:
            raise SchemaError(f"missing key {key!r}", _ptr(path))
        return None
    return d[key]


def _vec_json(v):
    return [fmt(x) for x in v]


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def digest(obj) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode("ascii")).hexdigest()


# ---------------------------------------------------------------- singularities and ideals


def parse_singularity(d, path=()) -> tuple[ToricSingularity, dict]:
    """Returns the singularity and its canonical record."""
    d = _expect_dict(d, path)
    kind = _get(d, "kind", path)
    label = d.get("label", "")
    try:
        if kind == "smooth":
            n = parse_int(_get(d, "n", path), path + ("n",), 1)
            s = ToricSingularity.smooth(n)
            rec = {"kind": kind, "n": n}
        elif kind == "cyclic_quotient":
            r = parse_int(_get(d, "r", path), path + ("r",), 1)
            w = _get(d, "weights", path)
            if not isinstance(w, list) or not w:
                raise SchemaError("expected a nonempty list", _ptr(path + ("weights",)))
            ws = [parse_int(x, path + ("weights", i)) for i, x in enumerate(w)]
            s = ToricSingularity.cyclic_quotient(r, ws)
            rec = {"kind": kind, "r": r, "weights": ws}
        elif kind in ("rays", "dual_rays"):
            vecs = parse_vecs(_get(d, kind, path), path + (kind,))
            lat = None
            rec = {"kind": kind, kind: [_vec_json(v) for v in vecs]}
            if "lattice" in d:
                basis = parse_vecs(d["lattice"], path + ("lattice",))
                lat = Lattice(len(basis), basis)
                rec["lattice"] = [_vec_json(v) for v in basis]
            ctor = ToricSingularity.from_rays if kind == "rays" else ToricSingularity.from_dual_rays
            s = ctor(vecs, lat, label=label or kind)
        else:
            raise SchemaError(f"unknown singularity kind {kind!r}", _ptr(path + ("kind",)))
    except (ValueError, KefvolError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc), _ptr(path)) from exc
    if label:
        rec["label"] = label
        object.__setattr__(s, "label", label)
    return s, rec


def parse_ideal_on(s: ToricSingularity, d, path=()) -> tuple[MonomialIdeal, object]:
    """An ideal on a given singularity: "maximal", or {"generators"|"maximal", "power"}."""
    if d == "maximal":
        return maximal_ideal(s), "maximal"
    d = _expect_dict(d, path)
    if "generators" in d:
        gens = parse_vecs(d["generators"], path + ("generators",))
        if len(gens[0]) != s.dim:
            raise SchemaError("generator dimension differs from the singularity", _ptr(path + ("generators",)))
        try:
            a = MonomialIdeal(s, gens)
        except ValueError as exc:
            raise SchemaError(str(exc), _ptr(path + ("generators",))) from exc
        rec = {"generators": [_vec_json(u) for u in a.generators]}
    elif d.get("maximal") is True:
        a = maximal_ideal(s)
        rec = {"maximal": True}
    else:
        raise SchemaError("an ideal needs 'generators' or 'maximal': true", _ptr(path))
    if "power" in d:
        k = parse_int(d["power"], path + ("power",), 1)
        a = ideal_power(a, k)
        rec["power"] = k
    return a, rec


def parse_ideal_file(d) -> MonomialIdeal:
    """The standalone ideal format {"singularity": {...}, "generators": [...]}."""
    d = _expect_dict(d, ())
    _check_schema_tag(d)
    s, _ = parse_singularity(_get(d, "singularity", ()), ("singularity",))
    body = {k: v for k, v in d.items() if k in ("generators", "maximal", "power")}
    a, _ = parse_ideal_on(s, body, ())
    return a


def parse_valuation_file(d) -> MonomialValuation:
    d = _expect_dict(d, ())
    _check_schema_tag(d)
    s, _ = parse_singularity(_get(d, "singularity", ()), ("singularity",))
    w = parse_vec(_get(d, "weight", ()), ("weight",))
    try:
        return MonomialValuation(s, w)
    except ValueError as exc:
        raise SchemaError(str(exc), "/weight") from exc


def _check_schema_tag(d):
    tag = d.get("schema", SCHEMA)
    if tag != SCHEMA:
        raise SchemaError(f"unsupported schema {tag!r}", "/schema")


# ---------------------------------------------------------------- groups and models


def parse_cyc(x, path=()) -> CycNum:
    if isinstance(x, dict):
        n = parse_int(_get(x, "conductor", path), path + ("conductor",), 1)
        coeffs = _get(x, "coeffs", path)
        if not isinstance(coeffs, list):
            raise SchemaError("coeffs must be a list", _ptr(path + ("coeffs",)))
        return CycNum(n, [parse_rat(c, path + ("coeffs", i)) for i, c in enumerate(coeffs)])
    return CycNum.rational(parse_rat(x, path))


def _cyc_json(c: CycNum):
    if c.is_rational():
        return fmt(c.to_rational())
    return {"conductor": c.conductor, "coeffs": [fmt(x) for x in c.coeffs]}


def parse_group(g, path=()) -> tuple[FiniteMatrixGroup, object]:
    try:
        if isinstance(g, str):
            return du_val_group(g), g
        g = _expect_dict(g, path)
        if "cyclic" in g:
            c = _expect_dict(g["cyclic"], path + ("cyclic",))
            r = parse_int(_get(c, "r", path + ("cyclic",)), path + ("cyclic", "r"), 1)
            ws = [parse_int(x, path + ("cyclic", "weights", i))
                  for i, x in enumerate(_get(c, "weights", path + ("cyclic",)))]
            return cyclic_group(r, ws), {"cyclic": {"r": r, "weights": ws}}
        gens = _get(g, "generators", path)
        if not isinstance(gens, list) or not gens:
            raise SchemaError("expected a nonempty list of matrices", _ptr(path + ("generators",)))
        mats = []
        for i, m in enumerate(gens):
            if not isinstance(m, list):
                raise SchemaError("expected a matrix", _ptr(path + ("generators", i)))
            mats.append(tuple(tuple(parse_cyc(x, path + ("generators", i, r, c)) for c, x in enumerate(row))
                              for r, row in enumerate(m)))
        label = g.get("label", "custom")
        G = group_closure(mats, label=label)
        rec = {"generators": [[[_cyc_json(x) for x in row] for row in m] for m in mats], "label": label}
        return G, rec
    except SchemaError:
        raise
    except (KefvolError, ValueError) as exc:
        raise SchemaError(str(exc), _ptr(path)) from exc


def parse_model(d, path=()) -> tuple[FanoModel, dict]:
    d = _expect_dict(d, path)
    kind = _get(d, "kind", path)
    if kind not in KINDS:
        raise SchemaError(f"unknown model kind {kind!r}", _ptr(path + ("kind",)))
    flag = d.get("kss_flag")
    if flag is not None and not isinstance(flag, bool):
        raise SchemaError("kss_flag must be a boolean", _ptr(path + ("kss_flag",)))
    label = d.get("label", "")
    rec: dict = {"kind": kind}
    try:
        if kind == "projective_space":
            n = parse_int(_get(d, "n", path), path + ("n",), 1)
            m = projective_space(n, True if flag is None else flag)
            rec["n"] = n
        elif kind == "weighted_projective":
            w = _get(d, "weights", path)
            if not isinstance(w, list):
                raise SchemaError("expected a list", _ptr(path + ("weights",)))
            ws = [parse_int(x, path + ("weights", i), 1) for i, x in enumerate(w)]
            m = weighted_projective(ws, flag)
            rec["weights"] = ws
        elif kind == "toric_polytope":
            verts = parse_vecs(_get(d, "vertices", path), path + ("vertices",))
            lat = None
            if "lattice" in d:
                basis = parse_vecs(d["lattice"], path + ("lattice",))
                lat = Lattice(len(basis), basis)
                rec["lattice"] = [_vec_json(v) for v in basis]
            m = toric_polytope(verts, lat, bool(flag), label or "toric")
            rec["vertices"] = [_vec_json(v) for v in m.params]
        else:
            G, grec = parse_group(_get(d, "group", path), path + ("group",))
            m = quotient_pn(G, flag)
            rec["group"] = grec
    except SchemaError:
        raise
    except (KefvolError, ValueError) as exc:
        raise SchemaError(str(exc), _ptr(path)) from exc
    rec["kss_flag"] = m.kss_flag
    if label:
        rec["label"] = label
        object.__setattr__(m, "label", label)
    return m, rec


# ---------------------------------------------------------------- corpus


CASE_KEYS = {
    "thm_main1": ({"model"}, {"point", "ideal"}),
    "thm_main2": ({"model", "weight"}, {"point"}),
    "quotsing": ({"model"}, {"point"}),
    "logdp": ({"model"}, {"point"}),
    "nonterm": ({"model"}, {"point"}),
    "dfem": ({"singularity", "ideal"}, set()),
    "cone_dfem": ({"singularity", "r", "volV"}, {"ideals", "random_ideals"}),
    "compare2": ({"singularity"}, {"budget"}),
    "prop_minlctmult": ({"singularity", "weight"}, set()),
}


@dataclass(frozen=True)
class Entry:
    """A named model or singularity with its canonical record."""

    id: str
    record: str  # canonical JSON
    value: object


@dataclass(frozen=True)
class CaseRequest:
    name: str
    theorem: str
    params: str  # canonical JSON of the case-specific fields

    @property
    def fields(self) -> dict:
        return json.loads(self.params)


@dataclass(frozen=True)
class CorpusFile:
    models: tuple
    singularities: tuple
    cases: tuple
    seed: int
    tol: float

    def model(self, ident: str) -> FanoModel:
        for e in self.models:
            if e.id == ident:
                return e.value
        raise UnresolvedReference(f"unknown model id {ident!r}")

    def singularity(self, ident: str) -> ToricSingularity:
        for e in self.singularities:
            if e.id == ident:
                return e.value
        raise UnresolvedReference(f"unknown singularity id {ident!r}")

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "models": [dict(json.loads(e.record), id=e.id) for e in self.models],
            "singularities": [dict(json.loads(e.record), id=e.id) for e in self.singularities],
            "cases": [dict(c.fields, name=c.name, theorem=c.theorem) for c in self.cases],
            "seed": self.seed,
            "tol": self.tol,
        }

    @property
    def digest(self) -> str:
        return digest(self.to_json())


def _entries(items, key, parser):
    if items is None:
        return ()
    if not isinstance(items, list):
        raise SchemaError("expected a list", _ptr((key,)))
    out = []
    seen = set()
    for i, d in enumerate(items):
        path = (key, i)
        d = _expect_dict(d, path)
        ident = _get(d, "id", path)
        if not isinstance(ident, str) or not ident:
            raise SchemaError("id must be a nonempty string", _ptr(path + ("id",)))
        if ident in seen:
            raise SchemaError(f"duplicate id {ident!r}", _ptr(path + ("id",)))
        seen.add(ident)
        body = {k: v for k, v in d.items() if k != "id"}
        value, rec = parser(body, path)
        out.append(Entry(ident, canonical_dumps(rec), value))
    return tuple(out)


def _normalize_case(d, path, models, sings):
    theorem = _get(d, "theorem", path)
    if theorem not in CASE_KEYS:
        raise SchemaError(f"unknown theorem id {theorem!r}; expected one of {', '.join(CASE_IDS)}",
                          _ptr(path + ("theorem",)))
    required, optional = CASE_KEYS[theorem]
    body = {k: v for k, v in d.items() if k not in ("name", "theorem")}
    for k in required:
        if k not in body:
            raise SchemaError(f"missing key {k!r} for {theorem}", _ptr(path))
    extra = set(body) - required - optional
    if extra:
        raise SchemaError(f"unexpected keys {sorted(extra)}", _ptr(path))
    rec: dict = {}
    if "model" in body:
        if body["model"] not in models:
            raise UnresolvedReference(f"{_ptr(path + ('model',))}: unknown model id {body['model']!r}")
        rec["model"] = body["model"]
    if "singularity" in body:
        if body["singularity"] not in sings:
            raise UnresolvedReference(
                f"{_ptr(path + ('singularity',))}: unknown singularity id {body['singularity']!r}")
        rec["singularity"] = body["singularity"]
    if "point" in body:
        p = body["point"]
        if isinstance(p, str):
            if p not in ("first", "quotient", "singular"):
                raise SchemaError("point must be a vertex, 'first', 'quotient' or 'singular'",
                                  _ptr(path + ("point",)))
            rec["point"] = p
        else:
            rec["point"] = _vec_json(parse_vec(p, path + ("point",)))
    if "weight" in body:
        rec["weight"] = _vec_json(parse_vec(body["weight"], path + ("weight",)))
    for k in ("r", "volV"):
        if k in body:
            v = parse_rat(body[k], path + (k,))
            if v <= 0:
                raise SchemaError(f"{k} must be positive", _ptr(path + (k,)))
            rec[k] = fmt(v)
    for k in ("budget", "random_ideals"):
        if k in body:
            rec[k] = parse_int(body[k], path + (k,), 0)
    if "ideal" in body:
        rec["ideal"] = _ideal_record(body["ideal"], path + ("ideal",))
    if "ideals" in body:
        if not isinstance(body["ideals"], list):
            raise SchemaError("expected a list", _ptr(path + ("ideals",)))
        rec["ideals"] = [_ideal_record(x, path + ("ideals", i)) for i, x in enumerate(body["ideals"])]
    return theorem, rec


def _ideal_record(x, path):
    """Syntax-only normalization; the ideal is built against its singularity at run time."""
    if x == "maximal":
        return "maximal"
    x = _expect_dict(x, path)
    rec: dict = {}
    if "generators" in x:
        rec["generators"] = [_vec_json(v) for v in parse_vecs(x["generators"], path + ("generators",))]
    elif x.get("maximal") is True:
        rec["maximal"] = True
    else:
        raise SchemaError("an ideal needs 'generators' or 'maximal': true", _ptr(path))
    if "power" in x:
        rec["power"] = parse_int(x["power"], path + ("power",), 1)
    extra = set(x) - {"generators", "maximal", "power"}
    if extra:
        raise SchemaError(f"unexpected keys {sorted(extra)}", _ptr(path))
    return rec


def corpus_from_json(d) -> CorpusFile:
    d = _expect_dict(d, ())
    _check_schema_tag(d)
    models = _entries(d.get("models"), "models", parse_model)
    sings = _entries(d.get("singularities"), "singularities", parse_singularity)
    seed = parse_int(d.get("seed", 0), ("seed",), 0)
    tol = d.get("tol", 1e-9)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not tol > 0:
        raise SchemaError("tol must be a positive number", "/tol")
    cases_raw = d.get("cases", [])
    if not isinstance(cases_raw, list):
        raise SchemaError("expected a list", "/cases")
    model_ids = {e.id for e in models}
    sing_ids = {e.id for e in sings}
    cases = []
    names = set()
    for i, c in enumerate(cases_raw):
        path = ("cases", i)
        c = _expect_dict(c, path)
        name = _get(c, "name", path)
        if not isinstance(name, str) or not name:
            raise SchemaError("name must be a nonempty string", _ptr(path + ("name",)))
        if name in names:
            raise SchemaError(f"duplicate case name {name!r}", _ptr(path + ("name",)))
        names.add(name)
        theorem, rec = _normalize_case(c, path, model_ids, sing_ids)
        cases.append(CaseRequest(name, theorem, canonical_dumps(rec)))
    return CorpusFile(models, sings, tuple(cases), seed, float(tol))


def parse_corpus(path) -> CorpusFile:
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno}", "") from exc
    return corpus_from_json(d)


def serialize_corpus(c: CorpusFile) -> str:
    return json.dumps(c.to_json(), sort_keys=True, indent=2) + "\n"


__all__ = [
    "SCHEMA",
    "CaseRequest",
    "CorpusFile",
    "Entry",
    "canonical_dumps",
    "corpus_from_json",
    "digest",
    "parse_corpus",
    "parse_group",
    "parse_ideal_file",
    "parse_ideal_on",
    "parse_model",
    "parse_rat",
    "parse_singularity",
    "parse_valuation_file",
    "serialize_corpus",
]
