"""Exact checks of the volume inequalities on computable inputs.

Every check returns a :class:`TheoremCase` whose ``holds`` is an exact
rational comparison (valuation-side checks use the snapped minimizer).  The
K-semistability hypotheses are never decided here: they come from the
``kss_flag`` of the model, and a check on an unflagged model still runs but
emits :class:`NotFlaggedSemistable`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegreeOutOfRange,
    EmptyCorpus,
    MissingGroup,
    NoConvergence,
    NotFlaggedSemistable,
    TerminalPoint,
)
from .exact.rational import fmt
from .fano import (
    FanoModel,
    MarkedPoint,
    anticanonical_volume,
    local_group,
    marked_points,
    quotient_pn,
)
from .molien import ade_order, du_val_group, mat_det, parse_ade, scalar_subgroup_order
from .monomial import (
    MonomialIdeal,
    ToricSingularity,
    lct_monomial,
    maximal_ideal,
    mult_monomial,
    random_ideal,
)
from .valuation import MonomialValuation, hvol, hvol_minimize, realization_level, realizing_ideal

CASE_IDS = (
    "thm_main1",
    "thm_main2",
    "dfem",
    "quotsing",
    "logdp",
    "nonterm",
    "cone_dfem",
    "compare2",
    "prop_minlctmult",
)


@dataclass(frozen=True)
class CaseResult:
    lhs: Fraction
    rhs: Fraction
    holds: bool
    equality: bool


@dataclass(frozen=True)
class TheoremCase:
    """One evaluated inequality.

    ``flagged`` says whether the hypotheses of the statement are asserted for
    this input (the model's kss flag, or True for unconditional statements);
    only flagged failures count as violations.  ``inputs`` and ``extras`` are
    tuples of (key, text) pairs.
    """

    id: str
    inputs: tuple
    result: CaseResult
    notes: str = ""
    flagged: bool = True
    extras: tuple = field(default=())

    @property
    def violated(self) -> bool:
        return self.flagged and not self.result.holds


def lct_mult_product(a: MonomialIdeal) -> Fraction:
    """lct(a)^n mult(a)."""
    return lct_monomial(a) ** a.n * mult_monomial(a)


def _factor(n: int) -> Fraction:
    return Fraction(n + 1, n) ** n


def _mp_inputs(mp: MarkedPoint, **more):
    items = [("model", mp.model.label), ("point", ",".join(fmt(x) for x in mp.vertex))]
    items += [(k, str(v)) for k, v in more.items()]
    return tuple(items)


def _flag_warning(m: FanoModel):
    if not m.kss_flag:
        warnings.warn(f"{m.label} is not flagged K-semistable; the bound is not asserted",
                      NotFlaggedSemistable, stacklevel=3)


def _gens_text(a: MonomialIdeal) -> str:
    return " ".join("(" + ",".join(fmt(x) for x in u) + ")" for u in a.generators)


# ---------------------------------------------------------------- global bounds


def verify_main1(mp: MarkedPoint, a: MonomialIdeal) -> TheoremCase:
    """(-K_X)^n <= (1+1/n)^n lct(X; I_Z)^n mult_Z X."""
    _flag_warning(mp.model)
    n = mp.n
    lhs = anticanonical_volume(mp.model)
    lct = lct_monomial(a)
    mult = mult_monomial(a)
    rhs = _factor(n) * lct ** n * mult
    notes = f"lct={fmt(lct)} mult={fmt(mult)}"
    return TheoremCase("thm_main1", _mp_inputs(mp, ideal=_gens_text(a)),
                       CaseResult(lhs, rhs, lhs <= rhs, lhs == rhs), notes, mp.model.kss_flag)


def verify_main2(mp: MarkedPoint, v: MonomialValuation) -> TheoremCase:
    """(-K_X)^n <= (1+1/n)^n hvol(v)."""
    _flag_warning(mp.model)
    n = mp.n
    lhs = anticanonical_volume(mp.model)
    h = hvol(v)
    rhs = _factor(n) * h
    return TheoremCase("thm_main2", _mp_inputs(mp, weight=",".join(fmt(x) for x in v.weight)),
                       CaseResult(lhs, rhs, lhs <= rhs, lhs == rhs), f"hvol={fmt(h)}", mp.model.kss_flag)


def verify_quot_bound(m: FanoModel, point: MarkedPoint | None = None) -> TheoremCase:
    """(-K_X)^n <= (n+1)^n / |G| for the orbifold group G of a point.

    G is the model's group for quotient_pn, otherwise the local group of the
    given simplicial toric point.  Equality is annotated with the
    characterization d = |G ∩ scalars| = 1 and X = P^n/G.
    """
    _flag_warning(m)
    if m.kind == "quotient_pn" and point is None:
        G = m.group
        where = "quotient point"
    elif point is not None:
        if point.model != m:
            raise MissingGroup("the point does not belong to the model")
        G = m.group if (m.kind == "quotient_pn" and point.vertex == tuple(Fraction(-1) for _ in range(m.n))) \
            else local_group(point.local)
        where = ",".join(fmt(x) for x in point.vertex)
    else:
        raise MissingGroup("no orbifold group: pass a marked point or use a quotient_pn model")
    n = m.n
    lhs = anticanonical_volume(m)
    rhs = Fraction((n + 1) ** n, G.order)
    eq = lhs == rhs
    d = scalar_subgroup_order(G)
    if eq:
        notes = f"equality; d={d}, expected for P^n/G with d=1"
        if not (d == 1 and (m.kind == "quotient_pn" or G.order == 1)):
            notes += " (characterization not matched)"
    else:
        notes = f"strict; |G|={G.order} d={d}"
    case_id = "logdp" if n == 2 else "quotsing"
    return TheoremCase(case_id, (("model", m.label), ("point", where), ("order", str(G.order))),
                       CaseResult(lhs, rhs, lhs <= rhs, eq), notes, m.kss_flag)


def _e_lower_bound(terms: int) -> Fraction:
    return sum((Fraction(1, math.factorial(k)) for k in range(terms)), Fraction(0))


def verify_nonterm(mp: MarkedPoint) -> TheoremCase:
    """(-K_X)^n <= (1+1/n)^n mult_p X < e mult_p X at a non-terminal point.

    Applicability is decided by lct(m_p) <= 1; otherwise TerminalPoint.
    """
    mp_ideal = maximal_ideal(mp.local)
    lct = lct_monomial(mp_ideal)
    if lct > 1:
        raise TerminalPoint(f"lct(m_p) = {fmt(lct)} > 1: the point is terminal")
    _flag_warning(mp.model)
    n = mp.n
    mult = mult_monomial(mp_ideal)
    lhs = anticanonical_volume(mp.model)
    rhs = _factor(n) * mult
    # (1+1/n)^n < sum_{k<=n+1} 1/k! < e, all rational
    e_lo = _e_lower_bound(n + 2)
    second = _factor(n) < e_lo
    holds = lhs <= rhs and second
    notes = f"lct(m_p)={fmt(lct)} mult={fmt(mult)} e>{fmt(e_lo)}"
    return TheoremCase("nonterm", _mp_inputs(mp), CaseResult(lhs, rhs, holds, lhs == rhs), notes,
                       mp.model.kss_flag)


# ---------------------------------------------------------------- local bounds


def verify_dfem(a: MonomialIdeal) -> TheoremCase:
    """lct(a)^n mult(a) >= n^n on a smooth germ; (>= hvol bound on singular ones is cone_dfem)."""
    n = a.n
    lhs = lct_mult_product(a)
    rhs = Fraction(n ** n)
    return TheoremCase("dfem", (("singularity", a.ambient.label), ("ideal", _gens_text(a))),
                       CaseResult(lhs, rhs, lhs >= rhs, lhs == rhs))


def cone_dfem(cone: ToricSingularity, r, vol_v, corpus, tol: float = 1e-6) -> TheoremCase:
    """lct^n mult >= (1/r) (-K_V)^(n-1) over a corpus of ideals on a cone over V.

    Also minimizes hvol on the cone and requires hvol_min >= bound - tol.
    """
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("cone_dfem needs at least one ideal")
    r = Fraction(r)
    vol_v = Fraction(vol_v)
    bound = vol_v / r
    values = [lct_mult_product(a) for a in corpus]
    lhs = min(values)
    res = hvol_minimize(cone, tol=min(tol, 1e-9))
    hmin = res.exact_value if res.exact_value is not None else res.value
    holds = lhs >= bound and float(hmin) >= float(bound) - tol
    notes = f"hvol_min={fmt(hmin) if isinstance(hmin, Fraction) else repr(hmin)} over {len(corpus)} ideals"
    extras = (("hvol_min_float", repr(res.value)), ("certificate_gap", repr(res.certificate_gap)))
    return TheoremCase("cone_dfem", (("singularity", cone.label), ("r", fmt(r)), ("volV", fmt(vol_v))),
                       CaseResult(lhs, bound, holds, lhs == bound), notes, True, extras)


def verify_minimizer_realization(v: MonomialValuation) -> TheoremCase:
    """lct(a_k(v))^n mult(a_k(v)) = hvol(v) for the realization level k."""
    k = realization_level(v)
    a = realizing_ideal(v)
    lhs = lct_mult_product(a)
    rhs = hvol(v)
    return TheoremCase("prop_minlctmult",
                       (("singularity", v.ambient.label), ("weight", ",".join(fmt(x) for x in v.weight))),
                       CaseResult(lhs, rhs, lhs == rhs, lhs == rhs), f"k={k} a_k={_gens_text(a)}")


def compare_infimums(s: ToricSingularity, tol: float = 1e-9, budget: int = 200, seed: int = 0) -> TheoremCase:
    """inf lct^n mult = inf hvol on a toric germ.

    The snapped minimizer xi* must satisfy lct(a_k)^n mult(a_k) = hvol(xi*)
    exactly, and no random finite-colength ideal may beat hvol(xi*) - tol.
    """
    try:
        res = hvol_minimize(s, tol=tol)
    except NoConvergence:
        raise
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(int(budget)):
        a = random_ideal(s, rng)
        val = lct_mult_product(a)
        if best is None or val < best:
            best = val
    if res.snapped is not None:
        v = res.snapped
        k = realization_level(v)
        a_k = realizing_ideal(v)
        realized = lct_mult_product(a_k)
        rhs = res.exact_value
        exact_eq = realized == rhs
        best = realized if best is None else min(best, realized)
        notes = f"k={k} xi*=({','.join(fmt(x) for x in v.weight)}) a_k={_gens_text(a_k)}"
    else:
        rhs = Fraction(res.value).limit_denominator(10 ** 12)
        exact_eq = False
        notes = "minimizer did not snap; realization not checked"
    holds = exact_eq and float(best) >= float(rhs) - tol
    extras = (("hvol_float", repr(res.value)), ("certificate_gap", repr(res.certificate_gap)),
              ("random_ideals", str(int(budget))), ("seed", str(int(seed))))
    return TheoremCase("compare2", (("singularity", s.label),),
                       CaseResult(best, rhs, holds, best == rhs), notes, True, extras)


# ---------------------------------------------------------------- Du Val classification


DUVAL_TABLE = {
    1: ("A1", "A2", "A3", "A4", "A5", "A6", "A7", "D4"),
    2: ("A1", "A2", "A3"),
    3: ("A1", "A2"),
    4: ("A1",),
}


def _canonical(label: str) -> str:
    kind, k = parse_ade(label)
    return f"{kind}{k}"


def screening_admissible(degree: int, label: str) -> bool:
    """|G| <= 9 / degree."""
    return ade_order(label) * degree <= 9


def _is_du_val_point(mp: MarkedPoint) -> bool:
    """Whether the local group of a toric point lies in SL(2)."""
    G = local_group(mp.local)
    return all(mat_det(g) == 1 for g in G.elements)


def equality_case_excluded(label: str) -> bool:
    """At |G| = 9/degree the surface must be P^2/G; exclude G if P^2/G has a non-Du Val point."""
    G = du_val_group(label)
    if not G.is_diagonal():
        return False
    model = quotient_pn(G)
    return not all(_is_du_val_point(p) for p in marked_points(model))


def derived_table(degree: int) -> tuple:
    """Screening plus the equality-case exclusion, over A_k (k <= 9), D_4..D_6, E_6..E_8."""
    labels = [f"A{k}" for k in range(1, 10)] + ["D4", "D5", "D6", "E6", "E7", "E8"]
    out = []
    for lab in labels:
        if not screening_admissible(degree, lab):
            continue
        if ade_order(lab) * degree == 9 and equality_case_excluded(lab):
            continue
        out.append(lab)
    return tuple(out)


def duval_classify(degree: int, sings) -> tuple[bool, str]:
    """Necessary condition on the Du Val singularities of a KE log del Pezzo of given degree."""
    degree = int(degree)
    if not 1 <= degree <= 9:
        raise DegreeOutOfRange(f"degree {degree} is outside 1..9")
    labels = [_canonical(s) for s in sings]
    allowed = DUVAL_TABLE.get(degree, ())
    for lab in labels:
        if lab not in allowed:
            if not screening_admissible(degree, lab):
                why = f"|G({lab})| = {ade_order(lab)} > 9/{degree}"
            elif ade_order(lab) * degree == 9:
                why = f"{lab} would force X = P^2/G, which has non-Du Val points"
            else:
                why = f"{lab} not allowed in degree {degree}"
            return False, why
    if not labels:
        return True, "smooth"
    return True, f"all of {', '.join(labels)} allowed in degree {degree}"


__all__ = [
    "CASE_IDS",
    "CaseResult",
    "DUVAL_TABLE",
    "TheoremCase",
    "compare_infimums",
    "cone_dfem",
    "derived_table",
    "duval_classify",
    "equality_case_excluded",
    "lct_mult_product",
    "screening_admissible",
    "verify_dfem",
    "verify_main1",
    "verify_main2",
    "verify_minimizer_realization",
    "verify_nonterm",
    "verify_quot_bound",
]
