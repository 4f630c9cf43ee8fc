from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from kefvol.errors import BudgetExceeded, InfiniteColength, TrivialIdeal
from kefvol.exact.lattice import Lattice
from kefvol.monomial import (
    MonomialIdeal,
    ToricSingularity,
    colength,
    dual_lattice_points,
    ideal_power,
    ideal_product,
    lct_monomial,
    lct_with_weight,
    maximal_ideal,
    mult_monomial,
    random_ideal,
)

F = Fraction


def quadric():
    return ToricSingularity.from_dual_rays([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)], label="quadric")


GERMS = {
    "C2": lambda: ToricSingularity.smooth(2),
    "C3": lambda: ToricSingularity.smooth(3),
    "A1": lambda: ToricSingularity.cyclic_quotient(2, [1, 1]),
    "A2": lambda: ToricSingularity.cyclic_quotient(3, [1, 2]),
    "1/5(1,2)": lambda: ToricSingularity.cyclic_quotient(5, [1, 2]),
    "1/2(1,1,1)": lambda: ToricSingularity.cyclic_quotient(2, [1, 1, 1]),
    "quadric": quadric,
}


# ---------------------------------------------------------------- singularities


def test_smooth_germ():
    s = ToricSingularity.smooth(3)
    assert s.is_simplicial
    assert s.gorenstein_covector == (1, 1, 1)
    assert s.dual_lattice_covolume == 1
    assert len(s.hilbert_basis) == 3


def test_cyclic_quotient_data():
    s = ToricSingularity.cyclic_quotient(3, [1, 2])
    assert s.lattice.index == F(1, 3)
    assert s.dual_lattice_covolume == 3
    # x^3, xy, y^3 generate the invariants
    assert len(s.hilbert_basis) == 3
    assert all(s.in_M(h) and s.in_dual_cone(h) for h in s.hilbert_basis)


def test_quadric_is_not_simplicial():
    s = quadric()
    assert not s.is_simplicial
    assert len(s.rays) == 4
    assert len(s.hilbert_basis) == 4
    assert all(sum(F(a) * b for a, b in zip(s.gorenstein_covector, r)) == 1 for r in s.rays)


def test_non_gorenstein_cone_is_rejected_or_q_gorenstein():
    # 1/3(1,1) is Q-Gorenstein: the covector pairs to 1 with the primitive rays
    s = ToricSingularity.cyclic_quotient(3, [1, 1])
    assert all(sum(a * b for a, b in zip(s.gorenstein_covector, r)) == 1 for r in s.rays)


def test_labels_do_not_affect_equality():
    a = ToricSingularity.smooth(2)
    b = ToricSingularity.from_rays([(1, 0), (0, 1)], Lattice.standard(2), label="other")
    assert a == b


# ---------------------------------------------------------------- ideals


def test_generators_are_minimalized():
    s = ToricSingularity.smooth(2)
    a = MonomialIdeal(s, ((2, 0), (0, 3), (2, 1), (3, 3)))
    assert set(a.generators) == {(2, 0), (0, 3)}
    assert a.contains((5, 0)) and not a.contains((1, 2))


def test_invalid_generators():
    s = ToricSingularity.cyclic_quotient(2, [1, 1])
    with pytest.raises(ValueError):
        MonomialIdeal(s, ((1, 0),))  # not an invariant monomial
    with pytest.raises(ValueError):
        MonomialIdeal(ToricSingularity.smooth(2), ((-1, 2),))
    with pytest.raises(ValueError):
        MonomialIdeal(ToricSingularity.smooth(2), ())


def test_cusp_values():
    s = ToricSingularity.smooth(2)
    a = MonomialIdeal(s, ((2, 0), (0, 3)))
    assert lct_monomial(a) == F(5, 6)
    assert mult_monomial(a) == 6
    assert colength(a) == 6


def test_maximal_ideal_invariants():
    # Du Val points have lct(m) = 1 and mult 2; the ordinary double point in dim 3 has lct(m) = 2
    expected = {"C2": (2, 1), "C3": (3, 1), "A1": (1, 2), "A2": (1, 2), "quadric": (2, 2)}
    for name, (lct, mult) in expected.items():
        m = maximal_ideal(GERMS[name]())
        assert lct_monomial(m) == lct, name
        assert mult_monomial(m) == mult, name


def test_finite_colength_detection():
    s = ToricSingularity.smooth(2)
    assert not MonomialIdeal(s, ((1, 1),)).is_finite_colength()
    with pytest.raises(InfiniteColength):
        colength(MonomialIdeal(s, ((1, 1),)))
    with pytest.raises(TrivialIdeal):
        lct_monomial(MonomialIdeal(s, ((0, 0),)))


def test_lct_of_principal_ideal():
    # lct(x^a y^b) = 1 / max(a, b)
    s = ToricSingularity.smooth(2)
    assert lct_monomial(MonomialIdeal(s, ((2, 5),))) == F(1, 5)


def test_lct_weight_attains_threshold():
    s = ToricSingularity.smooth(3)
    a = MonomialIdeal(s, ((3, 0, 0), (0, 2, 0), (0, 0, 5), (1, 1, 1)))
    lct, xi = lct_with_weight(a)
    assert s.in_cone(xi)
    assert min(sum(F(x) * y for x, y in zip(xi, u)) for u in a.generators) == 1
    assert sum(xi) == lct


def test_ideal_product_and_power_agree():
    s = ToricSingularity.cyclic_quotient(3, [1, 2])
    m = maximal_ideal(s)
    assert ideal_product(m, m) == ideal_power(m, 2)
    assert ideal_product(ideal_power(m, 2), m) == ideal_power(m, 3)


@pytest.mark.parametrize("name", list(GERMS))
@pytest.mark.parametrize("seed", range(4))
def test_power_scaling(name, seed):
    s = GERMS[name]()
    a = random_ideal(s, np.random.default_rng(seed))
    for k in (2, 3):
        b = ideal_power(a, k)
        assert lct_monomial(b) == lct_monomial(a) / k
        assert mult_monomial(b) == k ** s.dim * mult_monomial(a)


# ---------------------------------------------------------------- independent oracles


def _scipy_lct(a: MonomialIdeal) -> float:
    # min <m, xi> subject to <u, xi> >= 1 for every generator, xi in the cone
    s = a.ambient
    R = np.array([[float(x) for x in r] for r in s.rays])  # xi = R^T lam
    m = np.array([float(x) for x in s.gorenstein_covector])
    U = np.array([[float(x) for x in u] for u in a.generators])
    res = linprog(R @ m, A_ub=-(U @ R.T), b_ub=-np.ones(len(U)), bounds=[(0, None)] * len(R), method="highs")
    assert res.status == 0
    return res.fun


@pytest.mark.parametrize("name", list(GERMS))
def test_lct_matches_scipy_over_all_generators(name):
    s = GERMS[name]()
    rng = np.random.default_rng(11)
    for _ in range(15):
        a = random_ideal(s, rng)
        assert float(lct_monomial(a)) == pytest.approx(_scipy_lct(a), abs=1e-9)


def _finite_difference_mult(a, k0=12):
    n = a.n
    cs = [colength(a, k0 + j) for j in range(n + 1)]
    return sum((-1) ** (n - j) * math.comb(n, j) * cs[j] for j in range(n + 1))


@pytest.mark.parametrize("name", ["C2", "C3", "A1", "A2", "1/5(1,2)", "1/2(1,1,1)"])
def test_mult_matches_colength_growth(name):
    s = GERMS[name]()
    rng = np.random.default_rng(21)
    for _ in range(6):
        a = random_ideal(s, rng, max_degree=6)
        assert _finite_difference_mult(a) == mult_monomial(a)


def _brute_colength_c2(gens, k):
    powers = {(0, 0)}
    for _ in range(k):
        powers = {(p[0] + g[0], p[1] + g[1]) for p in powers for g in gens}
    bx = max(p[0] for p in powers)
    by = max(p[1] for p in powers)
    return sum(1 for i in range(bx + 1) for j in range(by + 1)
               if not any(i >= p[0] and j >= p[1] for p in powers))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7),
       st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), max_size=3), st.integers(1, 3))
def test_colength_matches_staircase_count(a, b, extra, k):
    s = ToricSingularity.smooth(2)
    gens = [(a, 0), (0, b)] + [g for g in extra if g != (0, 0)]
    ideal = MonomialIdeal(s, tuple(gens))
    assert colength(ideal, k) == _brute_colength_c2([tuple(int(x) for x in g) for g in ideal.generators], k)


def test_colength_closed_forms():
    A1 = maximal_ideal(GERMS["A1"]())
    Q = maximal_ideal(quadric())
    for k in range(1, 6):
        # invariants of 1/2(1,1) in degrees < 2k: sum of (2d + 1)
        assert colength(A1, k) == k * k
        # the quadric cone has Hilbert function (d + 1)^2
        assert colength(Q, k) == k * (k + 1) * (2 * k + 1) // 6


def test_colength_budget():
    s = ToricSingularity.smooth(3)
    a = MonomialIdeal(s, ((40, 0, 0), (0, 40, 0), (0, 0, 40)))
    with pytest.raises(BudgetExceeded):
        colength(a, 3, budget=1000)


def test_dual_lattice_points_in_triangle():
    s = ToricSingularity.cyclic_quotient(2, [1, 1])
    pts = dual_lattice_points(s, [((1, 0), 0), ((0, 1), 0), ((-1, -1), -2)])
    # the invariant monomials of degree <= 2: 1, x^2, xy, y^2
    assert len(pts) == 4
    assert all(s.in_M(p) for p in pts)


# ---------------------------------------------------------------- random ideals


@pytest.mark.parametrize("name", list(GERMS))
def test_random_ideals_are_finite_colength(name):
    s = GERMS[name]()
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = random_ideal(s, rng)
        assert a.is_finite_colength() and not a.is_trivial()


def test_random_ideal_is_reproducible():
    s = ToricSingularity.smooth(3)
    a = [random_ideal(s, np.random.default_rng(9)) for _ in range(2)]
    assert a[0] == a[1]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_dfem_floor_property(seed):
    rng = np.random.default_rng(seed)
    for n in (2, 3):
        a = random_ideal(ToricSingularity.smooth(n), rng)
        assert lct_monomial(a) ** n * mult_monomial(a) >= n ** n


def test_newton_vertices_are_generators():
    s = ToricSingularity.smooth(2)
    a = MonomialIdeal(s, ((4, 0), (1, 1), (0, 4), (2, 1)))
    assert set(a.newton.vertices) == {(4, 0), (1, 1), (0, 4)}
    facets = a.newton.compact_facets()
    assert all(off > 0 for _, off in facets)
    assert len(facets) == 2


def test_cone_simplices_tile_complement():
    s = ToricSingularity.smooth(3)
    a = MonomialIdeal(s, tuple(itertools.permutations((2, 0, 0))) + ((1, 1, 1),))
    vol = sum(abs(np.linalg.det(np.array(simp, dtype=float))) for simp in a.newton.cone_simplices())
    assert vol == pytest.approx(float(mult_monomial(a)), abs=1e-9)
