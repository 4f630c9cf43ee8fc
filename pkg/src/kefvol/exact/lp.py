"""Exact rational linear programming.

A dense two-phase tableau simplex over ``Fraction`` with Bland's rule, which
cannot cycle.  Problems here have a handful of variables and a few dozen
constraints, so nothing smarter is warranted.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..errors import Infeasible, Unbounded

_ZERO = Fraction(0)


def _simplex_phase(t, basis, cost_row, allowed):
    """Pivot tableau ``t`` (rows = constraints, last col = rhs) to optimality.

    ``cost_row`` is the reduced-cost row (same width as t rows), updated in
    place.  Only columns in ``allowed`` may enter.  Raises Unbounded.
    """
    m = len(t)
    while True:
        enter = next((j for j in allowed if cost_row[j] < 0), None)
        if enter is None:
            return
        best = None
        leave = None
        for i in range(m):
            a = t[i][enter]
            if a > 0:
                ratio = t[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise Unbounded("objective unbounded below")
        _pivot(t, cost_row, leave, enter)
        basis[leave] = enter


def _pivot(t, cost_row, r, c):
    piv = t[r][c]
    if piv != 1:
        t[r] = [x / piv for x in t[r]]
    row = t[r]
    for i in range(len(t)):
        if i != r:
            f = t[i][c]
            if f:
                t[i] = [x - f * y for x, y in zip(t[i], row)]
    f = cost_row[c]
    if f:
        cost_row[:] = [x - f * y for x, y in zip(cost_row, row)]


def simplex_standard(c: Sequence, a: Sequence[Sequence], b: Sequence):
    """Minimize c.z subject to A z = b, z >= 0.  Returns (value, z)."""
    m = len(a)
    nv = len(c)
    rows = []
    for i in range(m):
        r = [Fraction(x) for x in a[i]]
        bi = Fraction(b[i])
        if bi < 0:
            r = [-x for x in r]
            bi = -bi
        rows.append(r + [bi])
    # phase 1: artificials nv .. nv+m-1
    t = [r[:nv] + [Fraction(int(i == k)) for k in range(m)] + [r[nv]] for i, r in enumerate(rows)]
    basis = [nv + i for i in range(m)]
    width = nv + m
    cost = [_ZERO] * (width + 1)
    for i in range(m):
        for j in range(nv):
            cost[j] -= t[i][j]
        cost[-1] -= t[i][-1]
    _simplex_phase(t, basis, cost, range(nv))
    if cost[-1] != 0:
        raise Infeasible("constraints are inconsistent")
    # drive remaining artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(t):
        if basis[i] >= nv:
            j = next((j for j in range(nv) if t[i][j] != 0), None)
            if j is None:
                del t[i]
                del basis[i]
                continue
            _pivot(t, [_ZERO] * (width + 1), i, j)
            basis[i] = j
        i += 1
    t = [r[:nv] + [r[-1]] for r in t]
    # phase 2
    cost = [Fraction(x) for x in c] + [_ZERO]
    for i, bj in enumerate(basis):
        f = cost[bj]
        if f:
            cost = [x - f * y for x, y in zip(cost, t[i])]
    _simplex_phase(t, basis, cost, range(nv))
    z = [_ZERO] * nv
    for i, bj in enumerate(basis):
        z[bj] = t[i][-1]
    return -cost[-1], z


def _solve_once(objective, constraints, cone):
    """One LP over x = G·lam (lam >= 0) or x free; returns (value, x)."""
    n = len(objective)
    if cone is not None:
        gens = [[Fraction(x) for x in g] for g in cone]
        k = len(gens)
        cols = [[g[i] for g in gens] for i in range(n)]  # x_i = sum_j cols[i][j] lam_j

        def expand(row):
            return [sum((row[i] * cols[i][j] for i in range(n)), _ZERO) for j in range(k)]

        nvars = k
    else:
        nvars = 2 * n

        def expand(row):
            return list(row) + [-x for x in row]

    m = len(constraints)
    a = []
    b = []
    for idx, (cvec, rhs) in enumerate(constraints):
        row = expand([Fraction(x) for x in cvec])
        a.append(row + [Fraction(-int(j == idx)) for j in range(m)])
        b.append(Fraction(rhs))
    obj = expand([Fraction(x) for x in objective]) + [_ZERO] * m
    if not a:
        if any(x != 0 for x in obj[:nvars]) and (cone is None or any(x < 0 for x in obj[:nvars])):
            raise Unbounded("objective unbounded below")
        return _ZERO, tuple(_ZERO for _ in range(n))
    val, z = simplex_standard(obj, a, b)
    if cone is not None:
        x = tuple(sum((cols[i][j] * z[j] for j in range(k)), _ZERO) for i in range(n))
    else:
        x = tuple(z[i] - z[n + i] for i in range(n))
    return val, x


def lp_minimize(objective, constraints, cone=None, lex: bool = True):
    """Minimize <objective, x> subject to <c, x> >= b for each (c, b).

    If ``cone`` is given, x is restricted to the cone generated by those
    vectors.  Returns ``(optimum, argmin)``.  With ``lex`` set, the argmin is
    the lexicographically smallest point of the optimal face (coordinates
    that are unbounded below on that face are left where the solver put them).
    """
    objective = [Fraction(x) for x in objective]
    constraints = [([Fraction(x) for x in c], Fraction(b)) for c, b in constraints]
    val, x = _solve_once(objective, constraints, cone)
    if not lex:
        return val, x
    n = len(objective)
    cons = list(constraints) + [([-c for c in objective], -val)]
    for i in range(n):
        e = [Fraction(int(j == i)) for j in range(n)]
        try:
            xi, x = _solve_once(e, cons, cone)
        except Unbounded:
            continue
        cons.append((e, xi))
        cons.append(([-c for c in e], -xi))
    return val, x
