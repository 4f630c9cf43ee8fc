"""Dense exact linear algebra over Q and Z.

Matrices are lists of rows.  Everything is small (dimension <= 5 in practice),
so plain Gaussian elimination on ``Fraction`` is the right tool.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .rational import lcm_denominators


def to_matrix(rows) -> list[list[Fraction]]:
    return [[Fraction(x) for x in r] for r in rows]


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(r, c)), Fraction(0)) for c in bt] for r in a]


def matvec(a, v):
    return tuple(sum((x * y for x, y in zip(r, v)), Fraction(0)) for r in a)


def identity(n: int):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _echelon(m):
    """Row-reduce a copy of ``m``; return (reduced rows, pivot columns)."""
    m = to_matrix(m)
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(rows) -> int:
    if not rows:
        return 0
    return len(_echelon(rows)[1])


def det(m) -> Fraction:
    m = to_matrix(m)
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            out = -out
        piv = m[c][c]
        out *= piv
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / piv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return out


def int_det(m) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    m = [list(r) for r in m]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            p = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if p is None:
                return 0
            m[k], m[p] = m[p], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def solve(a, b):
    """Unique solution of ``a x = b`` for square ``a``, or ``None`` if singular."""
    n = len(a)
    aug = [list(r) + [bi] for r, bi in zip(to_matrix(a), b)]
    red, piv = _echelon(aug)
    if piv[:n] != list(range(n)) or len(piv) > n:
        return None
    return tuple(red[i][n] for i in range(n))


def inverse(a):
    n = len(a)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(to_matrix(a))]
    red, piv = _echelon(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red[:n]]


def nullspace(rows, ncols: int | None = None) -> list[tuple]:
    """Basis of {x : rows . x = 0}."""
    if not rows:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    red, piv = _echelon(rows)
    n = len(red[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -red[r][f]
        basis.append(tuple(v))
    return basis


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull of ``points`` (-1 for no points)."""
    if not points:
        return -1
    p0 = points[0]
    diffs = [[Fraction(x) - Fraction(y) for x, y in zip(p, p0)] for p in points[1:]]
    return rank(diffs) if diffs else 0


# ---------------------------------------------------------------- integer forms


def hermite_basis(gens: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """Column-style Hermite normal form of the lattice spanned by integer ``gens``.

    Returns ``n`` basis vectors (lower triangular, positive diagonal) for a
    full-rank lattice; raises ``ValueError`` if the generators do not span Q^n.
    """
    vecs = [list(map(int, g)) for g in gens if any(g)]
    basis = []
    for row in range(n):
        # gcd-combine every vector's `row` entry into a single pivot vector
        pivot = None
        rest = []
        for v in vecs:
            if v[row] == 0:
                rest.append(v)
                continue
            if pivot is None:
                pivot = v
                continue
            a, b = pivot[row], v[row]
            g, x, y = _ext_gcd(a, b)
            new_pivot = [x * p + y * q for p, q in zip(pivot, v)]
            other = [(b // g) * p - (a // g) * q for p, q in zip(pivot, v)]
            pivot = new_pivot
            if any(other):
                rest.append(other)
        if pivot is None:
            raise ValueError("generators do not span a full-rank lattice")
        if pivot[row] < 0:
            pivot = [-x for x in pivot]
        basis.append(pivot)
        vecs = rest
    # reduce entries below the diagonal into [0, pivot)
    for j in range(n):
        for i in range(j + 1, n):
            d = basis[i][i]
            q = basis[j][i] // d
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], basis[i])]
    return basis


def rational_lattice_basis(gens: Sequence[Sequence], n: int) -> list[tuple]:
    """Hermite basis of the lattice spanned by rational generators."""
    den = lcm_denominators(x for g in gens for x in g)
    ints = [[int(Fraction(x) * den) for x in g] for g in gens]
    hb = hermite_basis(ints, n)
    return [tuple(Fraction(x, den) for x in v) for v in hb]


def smith_diagonal(m: Sequence[Sequence[int]]) -> list[int]:
    """Invariant factors of an integer matrix (nonzero diagonal of its SNF)."""
    a = [list(map(int, r)) for r in m]
    rows, cols = len(a), len(a[0]) if a else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        a[t], a[pi] = a[pi], a[t]
        for r in a:
            r[t], r[pj] = r[pj], r[t]
        done = False
        while not done:
            done = True
            p = a[t][t]
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j]:
                    done = False
            if not done:
                nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols)
                      if a[i][j] and (i == t or j == t)]
                _, pi, pj = min(nz)
                a[t], a[pi] = a[pi], a[t]
                for r in a:
                    r[t], r[pj] = r[pj], r[t]
                continue
            # divisibility condition d_t | all remaining entries
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % a[t][t]), None)
            if bad is not None:
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                done = False
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def integer_kernel(row: Sequence[int]) -> list[list[int]]:
    """Z-basis of {x in Z^n : row . x = 0} via unimodular column operations."""
    n = len(row)
    u = [[int(i == j) for j in range(n)] for i in range(n)]  # columns track ops
    r = list(map(int, row))
    cols = list(range(n))
    # bring the gcd into column 0 by Euclid on pairs of columns
    for j in range(1, n):
        while r[j] != 0:
            q = r[0] // r[j]
            r[0], r[j] = r[j], r[0] - q * r[j]
            for i in range(n):
                u[i][0], u[i][j] = u[i][j], u[i][0] - q * u[i][j]
    del cols
    return [[u[i][j] for i in range(n)] for j in range(1, n)]


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def int_gcd(xs) -> int:
    g = 0
    for x in xs:
        g = math.gcd(g, int(x))
    return g
