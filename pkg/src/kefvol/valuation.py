"""Monomial valuations on toric singularities and minimization of hvol.

A weight xi in the interior of sigma defines val_xi(x^u) = <xi, u>.  With a
triangulation of sigma^v into simplicial cones spanned by w_1..w_n,

    vol(xi)  = sum_s |det W_s| / prod_j <xi, w_sj> / covol(M),
    A(xi)    = <m_sigma, xi>,
    hvol(xi) = A(xi)^n vol(xi).

hvol is invariant under rescaling xi, so the minimization runs on the slice
<m_sigma, xi> = n, where the objective is a positive sum of reciprocals of
products of positive linear forms, hence smooth and convex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import AmbientMismatch, NoConvergence, NonKlt, NonpositiveCutoff
from .exact.linalg import det, nullspace
from .exact.rational import dot, vsub
from .monomial import MonomialIdeal, ToricSingularity, dual_lattice_points

MAX_ITER = 100_000
SNAP_DENOMINATOR = 64


@dataclass(frozen=True)
class MonomialValuation:
    """The toric valuation with weight ``weight`` (exact, in the interior of sigma)."""

    ambient: ToricSingularity
    weight: tuple

    def __post_init__(self):
        xi = tuple(Fraction(x) for x in self.weight)
        if len(xi) != self.ambient.dim:
            raise ValueError("weight has the wrong dimension")
        if not self.ambient.in_cone_interior(xi):
            raise ValueError(f"weight {xi} is not in the interior of the cone")
        object.__setattr__(self, "weight", xi)

    def scaled(self, lam) -> "MonomialValuation":
        lam = Fraction(lam)
        if lam <= 0:
            raise ValueError("scale must be positive")
        return MonomialValuation(self.ambient, tuple(lam * x for x in self.weight))

    def __repr__(self):
        return f"MonomialValuation({self.ambient.label or 'X'}, ({', '.join(str(x) for x in self.weight)}))"


def val_apply(v: MonomialValuation, a: MonomialIdeal) -> Fraction:
    """v(a) = min over generators of <xi, u>."""
    if v.ambient != a.ambient:
        raise AmbientMismatch("valuation and ideal live on different singularities")
    return min(dot(v.weight, u) for u in a.generators)


def valuation_ideal(v: MonomialValuation, x) -> MonomialIdeal:
    """a_x(v): the monomials of value >= x, by their minimal generators."""
    x = Fraction(x)
    if x <= 0:
        raise NonpositiveCutoff("the cutoff must be positive")
    s = v.ambient
    top = x + max(dot(v.weight, h) for h in s.hilbert_basis)
    region = [(tuple(r), Fraction(0)) for r in s.rays] + [(tuple(-c for c in v.weight), -top)]
    pts = [p for p in dual_lattice_points(s, region) if dot(v.weight, p) >= x]
    # p is a minimal generator iff p - h is not in a_x(v) for every Hilbert basis element h
    shifts = [(h, dot(v.weight, h)) for h in s.hilbert_basis]
    gens = []
    for p in pts:
        vp = dot(v.weight, p)
        if all(vp - vh < x or not s.in_dual_cone(vsub(p, h)) for h, vh in shifts):
            gens.append(p)
    return MonomialIdeal(s, tuple(gens))


def log_discrepancy(v: MonomialValuation) -> Fraction:
    return dot(v.ambient.gorenstein_covector, v.weight)


def _simplex_data(s: ToricSingularity):
    """[(|det W_s| / covol(M), [w_s1..w_sn])] for the triangulation of sigma^v."""
    out = []
    for simp in s.dual_triangulation:
        ws = [s.dual_rays[j] for j in simp]
        out.append((abs(det(ws)) / s.dual_lattice_covolume, ws))
    return out


def vol_valuation(v: MonomialValuation) -> Fraction:
    total = Fraction(0)
    for c, ws in _simplex_data(v.ambient):
        prod = Fraction(1)
        for w in ws:
            prod *= dot(v.weight, w)
        total += c / prod
    return total


def hvol(v: MonomialValuation) -> Fraction:
    return log_discrepancy(v) ** v.ambient.dim * vol_valuation(v)


def hvol_of_weight(s: ToricSingularity, xi) -> Fraction:
    return hvol(MonomialValuation(s, tuple(xi)))


# ---------------------------------------------------------------- minimization


@dataclass(frozen=True)
class HvolResult:
    """Outcome of :func:`hvol_minimize`.

    ``minimizer`` is the float weight found (on the slice <m_sigma, xi> = n),
    ``value`` the float hvol there and ``certificate_gap`` a Frank-Wolfe
    duality bound on value - inf hvol.  ``snapped`` is the rational weight
    accepted by the snapping test (or None) and ``exact_value`` its exact hvol.
    """

    ambient: ToricSingularity
    minimizer: tuple
    value: float
    certificate_gap: float
    iterations: int
    snapped: MonomialValuation | None = None
    exact_value: Fraction | None = None


class _Objective:
    """f(xi) = sum_s c_s / prod_j <xi, w_sj> with gradient and Hessian (floats)."""

    def __init__(self, s: ToricSingularity):
        data = _simplex_data(s)
        self.c = np.array([float(c) for c, _ in data])
        self.W = np.array([[[float(x) for x in w] for w in ws] for _, ws in data])  # (S, n, n)

    def lin(self, xi):
        return self.W @ xi  # (S, n)

    def value(self, xi):
        ell = self.lin(xi)
        if np.any(ell <= 0):
            return math.inf
        return float(np.sum(self.c / np.prod(ell, axis=1)))

    def grad(self, xi):
        ell = self.lin(xi)
        terms = self.c / np.prod(ell, axis=1)  # (S,)
        inner = np.einsum("snk,sn->sk", self.W, 1.0 / ell)  # sum_j w_j / l_j
        return -np.einsum("s,sk->k", terms, inner)

    def hess(self, xi):
        ell = self.lin(xi)
        terms = self.c / np.prod(ell, axis=1)
        scaled = self.W / ell[:, :, None]  # w_j / l_j
        inner = scaled.sum(axis=1)
        h = np.einsum("s,si,sj->ij", terms, inner, inner)
        h += np.einsum("s,sni,snj->ij", terms, scaled, scaled)
        return h


def hvol_minimize(s: ToricSingularity, tol: float = 1e-9, max_iter: int = MAX_ITER) -> HvolResult:
    """Minimize hvol over monomial valuations of ``s``.

    Projected gradient with backtracking on the slice <m_sigma, xi> = n,
    followed by damped Newton steps restricted to the slice (quadratic
    convergence near the optimum, where plain gradient steps crawl on
    ill-conditioned cones).  Stops once the Frank-Wolfe gap, measured in hvol
    units, is below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = s.dim
    m = np.array([float(x) for x in s.gorenstein_covector])
    if not all(dot(s.gorenstein_covector, r) > 0 for r in s.rays):
        raise NonKlt("the Gorenstein covector is not positive on the cone")
    scale = float(n) ** n
    obj = _Objective(s)
    corners = np.array([[float(n * x) for x in r] for r in s.rays])
    xi = corners.mean(axis=0)
    # orthonormal basis of the slice directions {d : <m, d> = 0}
    basis = np.array([[float(x) for x in v] for v in nullspace([list(s.gorenstein_covector)])])
    q, _ = np.linalg.qr(basis.T)
    P = q[:, : n - 1]

    def gap_at(x, g):
        return scale * float(np.max((x - corners) @ g))

    fx = obj.value(xi)
    it = 0
    step = 1.0
    gap = math.inf
    # phase 1: projected gradient with backtracking
    while it < max_iter:
        g = obj.grad(xi)
        gap = gap_at(xi, g)
        if gap <= max(tol, 1e-6 * scale * fx):
            break
        d = -(P @ (P.T @ g))
        step = min(step * 2.0, 1e6)
        while True:
            cand = xi + step * d
            fc = obj.value(cand)
            if fc <= fx - 1e-4 * step * float(d @ d):
                break
            step *= 0.5
            if step < 1e-18:
                break
        if step < 1e-18:
            break
        xi, fx = cand, fc
        it += 1
    # phase 2: Newton on the slice
    while it < max_iter:
        g = obj.grad(xi)
        gap = gap_at(xi, g)
        if gap <= tol:
            break
        gr = P.T @ g
        hr = P.T @ obj.hess(xi) @ P
        try:
            dz = -np.linalg.solve(hr, gr)
        except np.linalg.LinAlgError:
            dz = -gr
        d = P @ dz
        t = 1.0
        while t > 1e-12:
            cand = xi + t * d
            fc = obj.value(cand)
            if fc <= fx + 1e-15 * abs(fx):
                break
            t *= 0.5
        if t <= 1e-12 or fc >= fx:
            it += 1
            g = obj.grad(xi)
            gap = gap_at(xi, g)
            break
        xi, fx = cand, fc
        it += 1
    value = scale * fx
    if gap > tol:
        raise NoConvergence(f"gap {gap:.3g} above tolerance after {it} iterations", best=value)
    snapped, exact = _snap(s, xi, value, tol)
    return HvolResult(s, tuple(float(x) for x in xi), value, gap, it, snapped, exact)


def _snap(s, xi, value, tol):
    """Round to denominators <= 64; accept if the exact hvol there is <= value + tol."""
    cand = tuple(Fraction(float(x)).limit_denominator(SNAP_DENOMINATOR) for x in xi)
    if not s.in_cone_interior(cand):
        return None, None
    v = MonomialValuation(s, cand)
    exact = hvol(v)
    if float(exact) <= value + tol:
        return v, exact
    return None, None


# ---------------------------------------------------------------- realization


def realization_level(v: MonomialValuation) -> int:
    """Least k >= 1 with k w / <xi, w> in M for every dual ray w.

    For that k the Newton polyhedron of a_k(v) is exactly {<xi, y> >= k} in
    sigma^v, so lct(a_k)^n mult(a_k) = hvol(v).
    """
    s = v.ambient
    pts = [tuple(x / dot(v.weight, w) for x in w) for w in s.dual_rays]
    k = 1
    # the answer divides the lcm of all denominators in M-coordinates
    while True:
        if all(s.in_M(tuple(k * x for x in p)) for p in pts):
            return k
        k += 1
        if k > 10 ** 6:
            raise ValueError("realization level too large")


def realizing_ideal(v: MonomialValuation) -> MonomialIdeal:
    return valuation_ideal(v, realization_level(v))


def hvol_float(s: ToricSingularity, xi) -> float:
    obj = _Objective(s)
    a = float(sum(float(x) * float(y) for x, y in zip(s.gorenstein_covector, xi)))
    return a ** s.dim * obj.value(np.array([float(x) for x in xi]))


__all__ = [
    "HvolResult",
    "MonomialValuation",
    "hvol",
    "hvol_float",
    "hvol_minimize",
    "hvol_of_weight",
    "log_discrepancy",
    "realization_level",
    "realizing_ideal",
    "val_apply",
    "valuation_ideal",
    "vol_valuation",
]

