from __future__ import annotations

import warnings
from fractions import Fraction

import numpy as np
import pytest

from kefvol.errors import DegreeOutOfRange, EmptyCorpus, MissingGroup, NotFlaggedSemistable, TerminalPoint
from kefvol.fano import marked_point, marked_points, projective_space, quotient_pn, quotient_point, \
    singular_points, toric_polytope, weighted_projective
from kefvol.molien import cyclic_group, du_val_group
from kefvol.monomial import MonomialIdeal, ToricSingularity, ideal_power, maximal_ideal, random_ideal
from kefvol.valuation import MonomialValuation, hvol_minimize
from kefvol.verify import (
    CASE_IDS,
    DUVAL_TABLE,
    compare_infimums,
    cone_dfem,
    derived_table,
    duval_classify,
    equality_case_excluded,
    lct_mult_product,
    screening_admissible,
    verify_dfem,
    verify_main1,
    verify_main2,
    verify_minimizer_realization,
    verify_nonterm,
    verify_quot_bound,
)

F = Fraction


def quadric():
    return ToricSingularity.from_dual_rays([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)], label="quadric")


def p1xp1():
    return toric_polytope([(0, 0), (2, 0), (0, 2), (2, 2)], kss_flag=True, label="P1xP1")


def ray_sum(p):
    return tuple(sum((r[i] for r in p.local.rays), F(0)) for i in range(p.n))


# ---------------------------------------------------------------- global bounds


def test_main1_on_projective_plane():
    p = marked_points(projective_space(2))[0]
    case = verify_main1(p, maximal_ideal(p.local))
    # 9 <= (3/2)^2 * 2^2 * 1
    assert case.id == "thm_main1"
    assert (case.result.lhs, case.result.rhs) == (9, 9)
    assert case.result.holds and case.result.equality and not case.violated


def test_main1_strict_for_larger_ideal():
    p = marked_point(p1xp1(), (-1, -1))
    case = verify_main1(p, ideal_power(maximal_ideal(p.local), 2))
    # lct scales by 1/2, mult by 4: the product is unchanged
    assert case.result.rhs == 9 and case.result.lhs == 8
    assert case.result.holds and not case.result.equality


def test_main2_on_quotient_plane():
    X = quotient_pn(du_val_group("A2"))
    p = quotient_point(X)
    case = verify_main2(p, MonomialValuation(p.local, (1, 1)))
    assert case.result.lhs == 3 and case.result.rhs == 3
    assert case.result.equality


def test_unflagged_model_warns_and_is_not_violation():
    m = weighted_projective([1, 1, 2])
    with pytest.warns(NotFlaggedSemistable):
        cases = [verify_main2(p, MonomialValuation(p.local, ray_sum(p))) for p in marked_points(m)]
    assert any(not c.result.holds for c in cases)
    assert not any(c.violated for c in cases)


def test_flagged_model_does_not_warn():
    p = marked_points(projective_space(2))[0]
    with warnings.catch_warnings():
        warnings.simplefilter("error", NotFlaggedSemistable)
        verify_main1(p, maximal_ideal(p.local))


@pytest.mark.parametrize("label,order", [("A2", 3), ("A4", 5), ("A6", 7)])
def test_quot_bound_equality_without_scalars(label, order):
    X = quotient_pn(du_val_group(label))
    assert X.kss_flag
    case = verify_quot_bound(X)
    assert case.id == "logdp"
    assert case.result.lhs == case.result.rhs == F(9, order)
    assert case.result.equality and "d=1" in case.notes


@pytest.mark.parametrize("label", ["A1", "A3", "D4"])
def test_quotients_with_scalars_are_not_flagged(label):
    # -1 in G acts on P^2 as a reflection, e.g. P^2/mu_2 = P(1,1,2)
    X = quotient_pn(du_val_group(label))
    assert not X.kss_flag
    with pytest.warns(NotFlaggedSemistable):
        case = verify_quot_bound(X)
    assert not case.result.holds and not case.violated


def test_quot_bound_on_smooth_point_and_errors():
    m = projective_space(3)
    p = marked_points(m)[0]
    case = verify_quot_bound(m, p)
    assert case.id == "quotsing"
    assert case.result.lhs == case.result.rhs == 64
    assert "d=1" in case.notes
    with pytest.raises(MissingGroup):
        verify_quot_bound(m)
    with pytest.raises(MissingGroup):
        verify_quot_bound(m, marked_points(projective_space(2))[0])


def test_quot_bound_strict_with_scalars():
    # 1/3(1,1) is scalar: X = P(1,1,3), volume 25/3, far above the bound 9/3
    X = quotient_pn(cyclic_group(3, [1, 1]))
    with pytest.warns(NotFlaggedSemistable):
        case = verify_quot_bound(X)
    assert case.result.lhs == F(25, 3)
    assert not case.result.holds


def test_nonterm_on_du_val_point():
    X = quotient_pn(du_val_group("A2"))
    case = verify_nonterm(quotient_point(X))
    assert case.result.lhs == 3 and case.result.rhs == F(9, 2)
    assert case.result.holds and not case.result.equality


def test_nonterm_rejects_terminal_points():
    with pytest.raises(TerminalPoint):
        verify_nonterm(marked_points(projective_space(2))[0])


def test_nonterm_on_weighted_plane_singularity():
    sing = singular_points(weighted_projective([1, 1, 2]))[0]
    with pytest.warns(NotFlaggedSemistable):
        case = verify_nonterm(sing)
    assert case.result.lhs == 8 and case.result.rhs == F(9, 2)
    assert not case.result.holds and not case.violated


# ---------------------------------------------------------------- local bounds


@pytest.mark.parametrize("n", [2, 3])
def test_dfem_on_random_ideals(n):
    s = ToricSingularity.smooth(n)
    rng = np.random.default_rng(40 + n)
    for _ in range(30):
        case = verify_dfem(random_ideal(s, rng))
        assert case.result.holds
    eq = verify_dfem(maximal_ideal(s))
    assert eq.result.equality


def test_cone_dfem_on_affine_space():
    s = ToricSingularity.smooth(3)
    rng = np.random.default_rng(7)
    corpus = [random_ideal(s, rng) for _ in range(20)] + [maximal_ideal(s)]
    case = cone_dfem(s, F(1, 3), 9, corpus)
    assert case.result.rhs == 27
    assert case.result.lhs == 27 and case.result.holds


def test_cone_dfem_on_quadric():
    s = quadric()
    rng = np.random.default_rng(8)
    corpus = [random_ideal(s, rng) for _ in range(15)]
    case = cone_dfem(s, F(1, 2), 8, corpus)
    assert case.result.rhs == 16
    assert case.result.holds
    assert float(dict(case.extras)["hvol_min_float"]) == pytest.approx(16, rel=1e-6)


def test_cone_dfem_on_a1():
    s = ToricSingularity.cyclic_quotient(2, [1, 1])
    case = cone_dfem(s, 1, 2, [maximal_ideal(s)])
    assert case.result.lhs == case.result.rhs == 2
    with pytest.raises(EmptyCorpus):
        cone_dfem(s, 1, 2, [])


@pytest.mark.parametrize("s", [ToricSingularity.smooth(2), ToricSingularity.cyclic_quotient(3, [1, 2]),
                               ToricSingularity.cyclic_quotient(5, [1, 2])])
def test_compare_infimums(s):
    case = compare_infimums(s, budget=40, seed=3)
    assert case.result.holds
    assert case.result.rhs == hvol_minimize(s).exact_value
    assert case.result.lhs == case.result.rhs


def test_cone_dfem_agrees_with_compare_infimums():
    s = quadric()
    a = cone_dfem(s, F(1, 2), 8, [maximal_ideal(s)])
    b = compare_infimums(s, budget=10)
    assert float(dict(a.extras)["hvol_min_float"]) == pytest.approx(float(b.result.rhs), rel=1e-6)


def test_minimizer_realization():
    s = ToricSingularity.cyclic_quotient(5, [1, 2])
    res = hvol_minimize(s)
    case = verify_minimizer_realization(res.snapped)
    assert case.result.equality and case.result.lhs == F(4, 5)


def test_lct_mult_product():
    s = ToricSingularity.smooth(2)
    assert lct_mult_product(MonomialIdeal(s, ((2, 0), (0, 3)))) == F(25, 36) * 6


def test_case_ids_are_complete():
    assert set(CASE_IDS) == {"thm_main1", "thm_main2", "dfem", "quotsing", "logdp", "nonterm", "cone_dfem",
                             "compare2", "prop_minlctmult"}


# ---------------------------------------------------------------- Du Val classification


def test_classifier_basic():
    assert duval_classify(1, ["A1", "A7", "D4"])[0]
    assert not duval_classify(1, ["A8"])[0]
    assert not duval_classify(2, ["A4"])[0]
    assert duval_classify(5, []) == (True, "smooth")
    assert not duval_classify(5, ["A1"])[0]


def test_classifier_explains_equality_exclusion():
    ok, why = duval_classify(1, ["A8"])
    assert not ok and "P^2/G" in why
    ok, why = duval_classify(3, ["A3"])
    assert not ok and "9/3" in why


@pytest.mark.parametrize("degree", [0, 10, -1])
def test_degree_out_of_range(degree):
    with pytest.raises(DegreeOutOfRange):
        duval_classify(degree, [])


def test_screening_and_exclusion():
    assert screening_admissible(1, "A8") and screening_admissible(3, "A2")
    assert not screening_admissible(1, "D5")
    # P^2 / mu_9 with weights (1, 8) has non-Du Val torus fixed points
    assert equality_case_excluded("A8")
    assert not equality_case_excluded("A2")


@pytest.mark.parametrize("degree", range(1, 10))
def test_derived_table(degree):
    assert derived_table(degree) == DUVAL_TABLE.get(degree, ())
