"""Finite matrix groups over cyclotomic fields and their Molien series.

The Molien series of G ⊂ GL(n) is

    sum_m dim C[x]^G_m t^m = (1/|G|) sum_g 1 / det(I - t g).

Two independent expansions are provided: a common-denominator one (every
det(I - t g) divides (1 - t^e)^n where e is a multiple of every element
order, so the whole sum is S(t) / (1 - t^e)^n with an exact rational
numerator S, expanded by its linear recurrence), and the naive per-element
power-series sum.  Both assert that every coefficient is a nonnegative
integer.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ClosureCapExceeded,
    DegreeTooSmall,
    NonRationalSeries,
    SingularGenerator,
    UnknownType,
)
from .exact.cyclotomic import CycNum, cyc, cyc_char_poly_factor, poly_exact_div, zeta

DEFAULT_CAP = 10_000

ADE_ORDERS = {"E6": 24, "E7": 48, "E8": 120}


def ade_order(label: str) -> int:
    """Order of the binary polyhedral group of a Du Val type (A_k, D_k, E6-8)."""
    kind, k = parse_ade(label)
    if kind == "A":
        return k + 1
    if kind == "D":
        return 4 * (k - 2)
    return ADE_ORDERS[f"E{k}"]


def parse_ade(label: str):
    m = re.fullmatch(r"\s*([ADEade])_?(\d+)\s*", str(label))
    if not m:
        raise UnknownType(f"unknown Du Val type {label!r}")
    kind, k = m.group(1).upper(), int(m.group(2))
    if kind == "A" and k >= 1:
        return kind, k
    if kind == "D" and k >= 4:
        return kind, k
    if kind == "E" and k in (6, 7, 8):
        return kind, k
    raise UnknownType(f"unknown Du Val type {label!r}")


# ---------------------------------------------------------------- matrices


def _mat(rows):
    return tuple(tuple(cyc(x) for x in r) for r in rows)


def mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(n)), CycNum(1, [0])) for j in range(n))
        for i in range(n)
    )


def mat_det(a):
    n = len(a)
    if n == 1:
        return a[0][0]
    out = CycNum(1, [0])
    for j in range(n):
        if a[0][j].is_zero():
            continue
        minor = tuple(tuple(r[c] for c in range(n) if c != j) for r in a[1:])
        term = a[0][j] * mat_det(minor)
        out = out + term if j % 2 == 0 else out - term
    return out


def identity_matrix(n: int):
    return _mat([[int(i == j) for j in range(n)] for i in range(n)])


def _key(mat, conductor):
    return tuple(x.lift(conductor).coeffs for r in mat for x in r)


def _is_scalar(mat) -> bool:
    n = len(mat)
    return all(mat[i][j].is_zero() for i in range(n) for j in range(n) if i != j) and all(
        mat[i][i] == mat[0][0] for i in range(n)
    )


@dataclass(frozen=True)
class FiniteMatrixGroup:
    """A finite group of n x n CycNum matrices, listed in closure (BFS) order."""

    n: int
    elements: tuple
    label: str = ""

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_diagonal(self) -> bool:
        return all(g[i][j].is_zero() for g in self.elements for i in range(self.n) for j in range(self.n) if i != j)

    def __repr__(self):
        return f"FiniteMatrixGroup({self.label or '?'}, order={self.order})"


def group_closure(generators, cap: int = DEFAULT_CAP, label: str = "") -> FiniteMatrixGroup:
    """The group generated by invertible matrices of finite order."""
    gens = [_mat(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator (use the identity)")
    n = len(gens[0])
    cond = 1
    for g in gens:
        if len(g) != n or any(len(r) != n for r in g):
            raise ValueError("generators must be square of equal size")
        if mat_det(g).is_zero():
            raise SingularGenerator("generator is not invertible")
        for r in g:
            for x in r:
                cond = cond * x.conductor // math.gcd(cond, x.conductor)
    ident = identity_matrix(n)
    seen = {_key(ident, cond)}
    elements = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                p = mat_mul(h, g)
                k = _key(p, cond)
                if k not in seen:
                    seen.add(k)
                    elements.append(p)
                    nxt.append(p)
                    if len(elements) > cap:
                        raise ClosureCapExceeded(f"more than {cap} elements")
        frontier = nxt
    return FiniteMatrixGroup(n, tuple(elements), label)


def _quaternion(a, b, c, d):
    """a + b i + c j + d k as a 2x2 complex matrix (i = zeta_4)."""
    i = zeta(4)
    return ((a + b * i, c + d * i), (-c + d * i, a - b * i))


def du_val_group(label: str) -> FiniteMatrixGroup:
    """The binary polyhedral subgroup of SU(2) of the given Du Val type."""
    kind, k = parse_ade(label)
    half = Fraction(1, 2)
    if kind == "A":
        z = zeta(k + 1)
        gens = [((z, 0), (0, z.inverse()))]
    elif kind == "D":
        m = k - 2
        z = zeta(2 * m)
        gens = [((z, 0), (0, z.inverse())), ((0, 1), (-1, 0))]
    elif k == 6:
        gens = [_quaternion(0, 1, 0, 0), _quaternion(half, half, half, half)]
    elif k == 7:
        z8 = zeta(8)
        gens = [_quaternion(0, 1, 0, 0), _quaternion(half, half, half, half), ((z8, 0), (0, z8.inverse()))]
    else:
        # icosians over Q(zeta_20): sqrt5 = 1 + 2(zeta_5 + zeta_5^4), phi = (1 + sqrt5)/2
        z5 = zeta(20, 4)
        sqrt5 = 1 + 2 * (z5 + z5 ** 4)
        phi = (1 + sqrt5) * half
        phi_inv = phi - 1
        gens = [_quaternion(half, half, half, half), _quaternion(phi * half, phi_inv * half, half, 0)]
    g = group_closure(gens, label=f"{kind}{k}")
    expected = ade_order(label)
    if g.order != expected:
        raise ArithmeticError(f"{label}: closure has order {g.order}, expected {expected}")
    return g


def cyclic_group(r: int, weights) -> FiniteMatrixGroup:
    """The diagonal cyclic group 1/r(a_1, ..., a_n) generated by diag(zeta_r^a_i)."""
    n = len(weights)
    gen = [[zeta(r, int(a)) if i == j else 0 for j in range(n)] for i, a in enumerate(weights)]
    return group_closure([gen], label=f"cyclic({r}; {', '.join(str(int(a)) for a in weights)})")


def trivial_group(n: int) -> FiniteMatrixGroup:
    return group_closure([identity_matrix(n)], label="trivial")


def scalar_subgroup_order(G: FiniteMatrixGroup) -> int:
    """|G ∩ scalars|."""
    return sum(1 for g in G.elements if _is_scalar(g))


def root_of_unity_exponent(c: CycNum) -> tuple[int, int]:
    """(k, N) with c = zeta_N^k, N = lcm(2, conductor); ValueError otherwise."""
    big = c.conductor * 2 // math.gcd(c.conductor, 2)
    for k in range(big):
        if zeta(big, k) == c:
            return k, big
    raise ValueError(f"{c!r} is not a root of unity")


# ---------------------------------------------------------------- Molien series


@dataclass(frozen=True)
class MolienSeries:
    group: FiniteMatrixGroup
    coeffs: tuple
    cumulative: tuple


def _char_poly_classes(G: FiniteMatrixGroup):
    """Counter of det(I - t g) over the group (keys: tuples of CycNum)."""
    counts: Counter = Counter()
    for g in G.elements:
        counts[tuple(cyc_char_poly_factor(g))] += 1
    return counts


def _as_int(x, where):
    if not isinstance(x, Fraction):
        if not x.is_rational():
            raise NonRationalSeries(f"coefficient {where} is not rational: {x!r}")
        x = x.to_rational()
    if x.denominator != 1 or x < 0:
        raise NonRationalSeries(f"coefficient {where} = {x} is not a nonnegative integer")
    return int(x)


def molien_coefficients(G: FiniteMatrixGroup, M: int) -> MolienSeries:
    """c_0..c_M via one rational function with a (1 - t^e)^n denominator."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    n = G.n
    e = G.order  # every element order divides |G|
    classes = _char_poly_classes(G)
    # D(t) = (1 - t^e)^n
    D = [CycNum(1, [0])] * (n * e + 1)
    for j in range(n + 1):
        D[j * e] = cyc(math.comb(n, j) * (-1) ** j)
    total = [CycNum(1, [0])] * (n * e + 1)
    for poly, mult in classes.items():
        # individual numerators are irrational; only the sum must be rational
        for i, c in enumerate(poly_exact_div(D, list(poly))):
            total[i] = total[i] + c * mult
    S = []
    for i, c in enumerate(total):
        if not c.is_rational():
            raise NonRationalSeries(f"numerator coefficient {i} is not rational: {c!r}")
        S.append(c.to_rational() / G.order)
    dcoef = {j * e: Fraction(math.comb(n, j) * (-1) ** j) for j in range(1, n + 1)}
    coeffs = []
    for m in range(M + 1):
        val = S[m] if m < len(S) else Fraction(0)
        for shift, dj in dcoef.items():
            if shift <= m:
                val -= dj * coeffs[m - shift]
        coeffs.append(_as_int(val, m))
    return _series(G, coeffs)


def molien_coefficients_direct(G: FiniteMatrixGroup, M: int) -> MolienSeries:
    """Second route: expand each 1/det(I - t g) as a power series and sum."""
    classes = _char_poly_classes(G)
    total = [CycNum(1, [0])] * (M + 1)
    for poly, mult in classes.items():
        p = list(poly)
        ser = []
        for m in range(M + 1):
            val = cyc(int(m == 0))
            for j in range(1, min(m, len(p) - 1) + 1):
                val = val - p[j] * ser[m - j]
            ser.append(val)
        for m in range(M + 1):
            total[m] = total[m] + ser[m] * mult
    coeffs = [_as_int(c / G.order, m) for m, c in enumerate(total)]
    return _series(G, coeffs)


def _series(G, coeffs):
    cum = []
    acc = 0
    for c in coeffs:
        acc += c
        cum.append(acc)
    return MolienSeries(G, tuple(coeffs), tuple(cum))


def invariant_monomial_count(G: FiniteMatrixGroup, M: int) -> list[int]:
    """Brute-force oracle for diagonal groups: invariant monomials per degree."""
    if not G.is_diagonal():
        raise ValueError("monomial counting needs a diagonal group")
    n = G.n
    chars = []
    for g in G.elements:
        exps = [root_of_unity_exponent(g[i][i]) for i in range(n)]
        N = 1
        for _, b in exps:
            N = N * b // math.gcd(N, b)
        chars.append(([k * (N // b) for k, b in exps], N))
    out = []
    for m in range(M + 1):
        cnt = 0
        for a in _compositions(m, n):
            if all(sum(x * y for x, y in zip(a, ks)) % N == 0 for ks, N in chars):
                cnt += 1
        out.append(cnt)
    return out


def _compositions(m, n):
    if n == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in _compositions(m - first, n - 1):
            yield (first,) + rest


def asymptotic_density(G: FiniteMatrixGroup, M: int) -> float:
    """n! d_{M-1} / M^n, which tends to 1/|G|."""
    if M < 1:
        raise DegreeTooSmall("need M >= 1")
    ser = molien_coefficients(G, M)
    if ser.cumulative[M] <= 0:
        raise DegreeTooSmall("no invariants up to degree M")
    return math.factorial(G.n) * ser.cumulative[M - 1] / M ** G.n


__all__ = [
    "FiniteMatrixGroup",
    "MolienSeries",
    "ade_order",
    "asymptotic_density",
    "cyclic_group",
    "du_val_group",
    "group_closure",
    "invariant_monomial_count",
    "molien_coefficients",
    "molien_coefficients_direct",
    "root_of_unity_exponent",
    "scalar_subgroup_order",
    "trivial_group",
]
