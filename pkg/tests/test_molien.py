from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kefvol.errors import ClosureCapExceeded, DegreeTooSmall, SingularGenerator, UnknownType
from kefvol.exact.cyclotomic import zeta
from kefvol.molien import (
    ade_order,
    asymptotic_density,
    cyclic_group,
    du_val_group,
    group_closure,
    invariant_monomial_count,
    molien_coefficients,
    molien_coefficients_direct,
    scalar_subgroup_order,
    trivial_group,
)


def series_quotient(num_terms, den_degrees, M):
    """Coefficients of sum t^a / prod (1 - t^d) through degree M (integer arithmetic)."""
    c = [0] * (M + 1)
    for a in num_terms:
        if a <= M:
            c[a] += 1
    for d in den_degrees:
        for m in range(d, M + 1):
            c[m] += c[m - d]
    return c


def klein_series(label, M):
    """Classical invariants of the binary polyhedral groups: generators and one relation."""
    kind, k = label[0], int(label[1:])
    if kind == "A":
        return series_quotient([0, k + 1], [2, k + 1], M)
    if kind == "D":
        m = k - 2
        return series_quotient([0, 2 * m + 2], [4, 2 * m], M)
    return {
        6: series_quotient([0, 12], [6, 8], M),
        7: series_quotient([0, 18], [8, 12], M),
        8: series_quotient([0, 30], [12, 20], M),
    }[k]


ADE = [f"A{k}" for k in range(1, 9)] + [f"D{k}" for k in range(4, 9)] + ["E6", "E7", "E8"]


@pytest.mark.parametrize("label", ADE)
def test_ade_series_matches_klein_invariants(label):
    G = du_val_group(label)
    assert G.order == ade_order(label)
    assert list(molien_coefficients(G, 60).coeffs) == klein_series(label, 60)


@pytest.mark.parametrize("label", ["A3", "D5", "E6", "E8"])
def test_two_routes_agree(label):
    G = du_val_group(label)
    assert molien_coefficients(G, 40) == molien_coefficients_direct(G, 40)


def test_trivial_group_counts_all_monomials():
    ser = molien_coefficients(trivial_group(3), 10)
    assert list(ser.coeffs) == [math.comb(m + 2, 2) for m in range(11)]
    assert ser.cumulative[2] == 1 + 3 + 6


def test_symmetric_group_on_three_letters():
    perms = [[[0, 1, 0], [1, 0, 0], [0, 0, 1]], [[0, 1, 0], [0, 0, 1], [1, 0, 0]]]
    G = group_closure(perms, label="S3")
    assert G.order == 6
    # symmetric polynomials: 1 / ((1 - t)(1 - t^2)(1 - t^3))
    assert list(molien_coefficients(G, 30).coeffs) == series_quotient([0], [1, 2, 3], 30)
    assert molien_coefficients_direct(G, 30) == molien_coefficients(G, 30)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 9), st.lists(st.integers(0, 8), min_size=2, max_size=3))
def test_cyclic_groups_match_monomial_count(r, weights):
    G = cyclic_group(r, weights)
    assert list(molien_coefficients(G, 20).coeffs) == invariant_monomial_count(G, 20)


def test_scalar_subgroup():
    assert scalar_subgroup_order(du_val_group("E8")) == 2
    assert scalar_subgroup_order(du_val_group("A2")) == 1
    assert scalar_subgroup_order(du_val_group("A3")) == 2
    assert scalar_subgroup_order(cyclic_group(3, [1, 1, 1])) == 3


def test_density_tends_to_inverse_order():
    G = cyclic_group(5, [1, 2])
    assert asymptotic_density(G, 400) == pytest.approx(1 / 5, rel=0.02)
    with pytest.raises(DegreeTooSmall):
        asymptotic_density(G, 0)


def test_closure_errors():
    with pytest.raises(SingularGenerator):
        group_closure([[[1, 0], [0, 0]]])
    with pytest.raises(ClosureCapExceeded):
        group_closure([[[zeta(7), 0], [0, 1]]], cap=3)
    with pytest.raises(ValueError):
        group_closure([])
    with pytest.raises(UnknownType):
        du_val_group("F4")


def test_monomial_count_needs_diagonal_group():
    with pytest.raises(ValueError):
        invariant_monomial_count(du_val_group("D4"), 5)


def test_molien_rejects_negative_degree():
    with pytest.raises(ValueError):
        molien_coefficients(trivial_group(2), -1)


def test_degree_zero_coefficient_is_one():
    for label in ADE:
        assert molien_coefficients(du_val_group(label), 0).coeffs == (1,)
