"""Monomial ideals on toric singularities.

Everything lives in reference coordinates of Q^n.  A singularity is a cone
sigma (rays in the lattice N) and the dual cone sigma^v in M = Hom(N, Z).
Monomials are points of sigma^v ∩ M, ideals are finite sets of them.

lct comes from the torus-invariant LP
    lct(a) = min <m_sigma, xi>  s.t.  <xi, u> >= 1 for all generators u, xi in sigma,
and mult(a) = n! vol(sigma^v minus Newt(a)) / covol(M), computed by coning the
compact facets of the Newton polyhedron from the origin.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import BudgetExceeded, InfiniteColength, NonQGorenstein, TrivialIdeal
from .exact.lattice import Lattice, lattice_from_quotient
from .exact.linalg import inverse, int_det, rank, solve, transpose
from .exact.lp import lp_minimize
from .exact.polytope import PolytopeQ, hull_facets, pulling_triangulation
from .exact.rational import dot, lcm_denominators, vsub

DEFAULT_ENUM_BUDGET = 20_000_000


def enum_budget() -> int:
    """Lattice-enumeration cap, overridable through KEFVOL_ENUM_BUDGET."""
    raw = os.environ.get("KEFVOL_ENUM_BUDGET")
    return int(raw) if raw else DEFAULT_ENUM_BUDGET


def _q(v):
    return tuple(Fraction(x) for x in v)


# ---------------------------------------------------------------- singularities


@dataclass(frozen=True)
class ToricSingularity:
    """An affine Q-Gorenstein toric singularity (full-dimensional pointed cone)."""

    dim: int
    lattice: Lattice
    rays: tuple
    gorenstein_covector: tuple
    dual_rays: tuple
    label: str = field(default="", compare=False)

    @property
    def dual_lattice_covolume(self) -> Fraction:
        return self.lattice.dual_covolume

    # constructors --------------------------------------------------------

    @classmethod
    def from_rays(cls, rays, lattice: Lattice | None = None, label: str = "") -> "ToricSingularity":
        rays = [_q(r) for r in rays]
        if not rays:
            raise ValueError("need at least one ray")
        n = len(rays[0])
        lattice = lattice or Lattice.standard(n)
        if rank(rays) != n:
            raise ValueError("cone is not full-dimensional")
        prim = sorted({lattice.primitive(r) for r in rays})
        facets = hull_facets([tuple(Fraction(0) for _ in range(n))], prim)
        if any(b != 0 for _, b in facets):
            raise ValueError("cone facets must pass through the origin")
        dual = sorted(lattice.dual_primitive(_q(a)) for a, _ in facets)
        if rank(dual) != n:
            raise ValueError("cone is not pointed")
        # keep only the extremal rays of sigma: those on n-1 independent facets
        extremal = []
        for r in prim:
            tight = [w for w in dual if dot(w, r) == 0]
            if tight and rank(tight) == n - 1:
                extremal.append(r)
        m = _gorenstein(extremal, n)
        return cls(n, lattice, tuple(extremal), m, tuple(dual), label)

    @classmethod
    def from_dual_rays(cls, dual_rays, lattice: Lattice | None = None, label: str = "") -> "ToricSingularity":
        dual_rays = [_q(w) for w in dual_rays]
        n = len(dual_rays[0])
        lattice = lattice or Lattice.standard(n)
        facets = hull_facets([tuple(Fraction(0) for _ in range(n))], dual_rays)
        return cls.from_rays([_q(a) for a, _ in facets], lattice, label)

    @classmethod
    def smooth(cls, n: int) -> "ToricSingularity":
        return cls.from_rays([[int(i == j) for j in range(n)] for i in range(n)], label=f"C^{n}")

    @classmethod
    def cyclic_quotient(cls, r: int, weights) -> "ToricSingularity":
        """The cyclic quotient singularity 1/r(a_1, ..., a_n)."""
        n = len(weights)
        lat = lattice_from_quotient(r, weights)
        label = f"1/{r}({','.join(str(int(a)) for a in weights)})"
        return cls.from_rays([[int(i == j) for j in range(n)] for i in range(n)], lat, label)

    # basic predicates ----------------------------------------------------

    @property
    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim

    def in_dual_cone(self, u) -> bool:
        return all(dot(r, u) >= 0 for r in self.rays)

    def in_M(self, u) -> bool:
        return self.lattice.dual_contains(u)

    def in_cone(self, xi) -> bool:
        return all(dot(w, xi) >= 0 for w in self.dual_rays)

    def in_cone_interior(self, xi) -> bool:
        return all(dot(w, xi) > 0 for w in self.dual_rays)

    @cached_property
    def _ray_matrix(self):
        return np.array([[int(x * lcm_denominators(r)) for x in r] for r in self.rays], dtype=object)

    # triangulation of the dual cone --------------------------------------

    @cached_property
    def dual_triangulation(self) -> tuple:
        """Simplicial cones (index tuples into dual_rays) covering sigma^v.

        Pulling triangulation of the cross-section <s, y> = 1 (s = sum of the
        rays of sigma), always pulling the lexicographically smallest dual ray.
        """
        if len(self.dual_rays) == self.dim:
            return (tuple(range(self.dim)),)
        s = tuple(sum((r[i] for r in self.rays), Fraction(0)) for i in range(self.dim))
        section = [tuple(x / dot(s, w) for x in w) for w in self.dual_rays]
        # facets of sigma^v are the rays of sigma; use them for incidence
        inc = [frozenset(j for j, w in enumerate(self.dual_rays) if dot(r, w) == 0) for r in self.rays]
        order = sorted(range(len(self.dual_rays)), key=lambda j: self.dual_rays[j])
        rank_of = {j: k for k, j in enumerate(order)}
        simps = pulling_triangulation(range(len(section)), self.dim - 1, section, inc,
                                      rank_key=rank_of.__getitem__)
        return tuple(tuple(sorted(sm)) for sm in simps)

    # Hilbert basis ---------------------------------------------------------

    @cached_property
    def hilbert_basis(self) -> tuple:
        """Minimal generators of the semigroup sigma^v ∩ M (lexicographic order)."""
        cands = set()
        dual_basis = self.lattice.dual_basis
        for simp in self.dual_triangulation:
            w = [self.dual_rays[j] for j in simp]
            cands.update(w)
            cands.update(_parallelepiped_points(w, dual_basis))
        cands.discard(tuple(Fraction(0) for _ in range(self.dim)))
        return tuple(sorted(_minimalize(list(cands), self.rays)))

    def __repr__(self):
        return f"ToricSingularity({self.label or self.rays!r})"


def _gorenstein(rays, n):
    base = None
    for combo in itertools.combinations(rays, n):
        if rank(combo) == n:
            base = combo
            break
    m = solve([list(r) for r in base], [Fraction(1)] * n)
    if any(dot(m, r) != 1 for r in rays):
        raise NonQGorenstein("no covector takes the value 1 on every ray")
    return m


def _parallelepiped_points(w, dual_basis):
    """M-points of the half-open parallelepiped spanned by the columns ``w``."""
    n = len(w)
    winv = inverse(transpose([list(x) for x in w]))  # lambda = W^{-1} y
    gens = []
    for b in dual_basis:
        lam = tuple(sum((a * x for a, x in zip(row, b)), Fraction(0)) for row in winv)
        gens.append(tuple(x - math.floor(x) for x in lam))
    zero = tuple(Fraction(0) for _ in range(n))
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple((a + b) - math.floor(a + b) for a, b in zip(p, g))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    out = []
    for lam in seen:
        out.append(tuple(sum((lam[j] * w[j][i] for j in range(n)), Fraction(0)) for i in range(n)))
    return out


def _minimalize(points, rays):
    """Drop every point u with u - u' in sigma^v for another point u'."""
    pts = sorted(set(points))
    if len(pts) <= 1:
        return pts
    den = lcm_denominators(x for p in pts for x in p)
    rden = [lcm_denominators(r) for r in rays]
    Pi = [[int(x * den) for x in p] for p in pts]
    Ri = [[int(x * d) for x in r] for r, d in zip(rays, rden)]
    bound = max(abs(x) for row in Pi for x in row) * max(abs(x) for row in Ri for x in row) * len(Ri[0])
    dtype = np.int64 if bound < 2 ** 62 else object
    vals = np.array(Pi, dtype=dtype) @ np.array(Ri, dtype=dtype).T
    keep = []
    for i in range(len(pts)):
        diff = vals[i][None, :] - vals
        dominated = np.all(diff >= 0, axis=1)
        dominated[i] = False
        if not np.any(dominated):
            keep.append(pts[i])
    return keep


# ---------------------------------------------------------------- ideals


@dataclass(frozen=True)
class MonomialIdeal:
    """A monomial ideal given by its minimal generators (sorted lexicographically)."""

    ambient: ToricSingularity
    generators: tuple

    def __post_init__(self):
        gens = [_q(u) for u in self.generators]
        if not gens:
            raise ValueError("a monomial ideal needs at least one generator")
        for u in gens:
            if len(u) != self.ambient.dim:
                raise ValueError(f"generator {u} has the wrong dimension")
            if not self.ambient.in_dual_cone(u):
                raise ValueError(f"generator {u} is outside the dual cone")
            if not self.ambient.in_M(u):
                raise ValueError(f"generator {u} is not in the lattice M")
        object.__setattr__(self, "generators", tuple(_minimalize(gens, self.ambient.rays)))

    @property
    def n(self) -> int:
        return self.ambient.dim

    def is_trivial(self) -> bool:
        return any(all(x == 0 for x in u) for u in self.generators)

    def contains(self, u) -> bool:
        """Whether the monomial u lies in the ideal."""
        u = _q(u)
        return self.ambient.in_dual_cone(u) and any(self.ambient.in_dual_cone(vsub(u, g)) for g in self.generators)

    def is_finite_colength(self) -> bool:
        if self.is_trivial():
            return True
        for w in self.ambient.dual_rays:
            if not any(_on_ray(u, w) for u in self.generators):
                return False
        return True

    @cached_property
    def newton(self) -> "NewtonPolyhedron":
        return NewtonPolyhedron.of(self)

    def __repr__(self):
        gens = ", ".join("(" + ",".join(str(x) for x in u) + ")" for u in self.generators)
        return f"MonomialIdeal({self.ambient.label or 'X'}: {gens})"


def _on_ray(u, w) -> bool:
    """u = t w for some t > 0."""
    if rank([u, w]) != 1:
        return False
    return dot(u, w) > 0


@dataclass(frozen=True)
class NewtonPolyhedron:
    """conv(generators) + sigma^v, as halfspaces <xi, y> >= c."""

    ideal: MonomialIdeal
    hull_halfspaces: tuple
    vertices: tuple

    @classmethod
    def of(cls, a: MonomialIdeal) -> "NewtonPolyhedron":
        s = a.ambient
        facets = hull_facets(list(a.generators), list(s.dual_rays))
        hs = tuple((tuple(Fraction(x) for x in nrm), off) for nrm, off in facets)
        verts = []
        for u in a.generators:
            tight = [nrm for nrm, off in hs if dot(nrm, u) == off]
            if len(tight) >= s.dim and rank(tight) == s.dim:
                verts.append(u)
        return cls(a, hs, tuple(verts))

    def contains(self, y) -> bool:
        return all(dot(nrm, y) >= off for nrm, off in self.hull_halfspaces)

    def compact_facets(self) -> list:
        """Facets with positive offset (bounded for finite-colength ideals)."""
        return [(nrm, off) for nrm, off in self.hull_halfspaces if off > 0]

    def cone_simplices(self) -> list[tuple]:
        """Simplices (n-tuples of vertices) whose cones from 0 tile sigma^v minus Newt."""
        n = self.ideal.n
        verts = list(self.vertices)
        inc = [frozenset(i for i, v in enumerate(verts) if dot(nrm, v) == off) for nrm, off in self.hull_halfspaces]
        memo: dict = {}
        out = []
        for (nrm, off), face in zip(self.hull_halfspaces, inc):
            if off <= 0:
                continue
            for simp in pulling_triangulation(face, n - 1, verts, inc, memo=memo):
                out.append(tuple(verts[i] for i in simp))
        return out


# ---------------------------------------------------------------- constructors


def maximal_ideal(s: ToricSingularity) -> MonomialIdeal:
    """The maximal ideal of the torus-fixed point: the Hilbert basis of sigma^v ∩ M."""
    return MonomialIdeal(s, s.hilbert_basis)


def ideal_power(a: MonomialIdeal, k: int) -> MonomialIdeal:
    k = int(k)
    if k < 1:
        raise ValueError("power must be positive")
    gens = list(a.generators)
    cur = list(gens)
    for _ in range(k - 1):
        sums = {tuple(x + y for x, y in zip(u, g)) for u in cur for g in gens}
        cur = _minimalize(list(sums), a.ambient.rays)
    return MonomialIdeal(a.ambient, tuple(cur))


def ideal_product(a: MonomialIdeal, b: MonomialIdeal) -> MonomialIdeal:
    if a.ambient != b.ambient:
        raise ValueError("ideals live on different singularities")
    sums = {tuple(x + y for x, y in zip(u, g)) for u in a.generators for g in b.generators}
    return MonomialIdeal(a.ambient, tuple(sums))


# ---------------------------------------------------------------- invariants


def lct_with_weight(a: MonomialIdeal):
    """(lct, xi*) where xi* in sigma computes the threshold."""
    if a.is_trivial():
        raise TrivialIdeal("the unit ideal has no log canonical threshold")
    s = a.ambient
    # xi in sigma is bounded below on sigma^v, so min <xi, Newt(a)> sits at a vertex
    cons = [(u, Fraction(1)) for u in a.newton.vertices]
    val, xi = lp_minimize(s.gorenstein_covector, cons, cone=s.rays)
    return val, xi


def lct_monomial(a: MonomialIdeal) -> Fraction:
    """Log canonical threshold of a monomial ideal."""
    return lct_with_weight(a)[0]


def mult_monomial(a: MonomialIdeal) -> Fraction:
    """Hilbert-Samuel multiplicity n! vol(sigma^v minus Newt(a)) / covol(M)."""
    if a.is_trivial():
        return Fraction(0)
    if not a.is_finite_colength():
        raise InfiniteColength("the complement of the Newton polyhedron is unbounded")
    total = 0
    den = lcm_denominators(x for u in a.generators for x in u)
    n = a.n
    for simp in a.newton.cone_simplices():
        total += abs(int_det([[int(x * den) for x in p] for p in simp]))
    return Fraction(total, den ** n) / a.ambient.dual_lattice_covolume


def colength(a: MonomialIdeal, k: int = 1, budget: int | None = None) -> int:
    """Number of monomials of sigma^v ∩ M outside a^k, by lattice-point counting."""
    k = int(k)
    if k < 1:
        raise ValueError("power must be positive")
    if not a.is_finite_colength():
        raise InfiniteColength("ideal is not of finite colength")
    if a.is_trivial():
        return 0
    budget = enum_budget() if budget is None else budget
    s = a.ambient
    if s.is_simplicial:
        return _colength_simplicial(a, k, budget)
    return _colength_bruteforce(a, k, budget)


def _colength_simplicial(a, k, budget):
    """Staircase counting in the coordinates of the simplicial dual cone.

    y = sum_j t_j w_j with t >= 0; scaled coordinates s = d·t are integral.
    a^k is an up-set in s-space, described by a height function
    H(s_1..s_{n-1}) = least s_n of a point of a^k above (s_1..s_{n-1}); a^(j+1)
    is obtained from a^j by the min-plus recursion H' = min_g H(. - g') + g_n.
    """
    s = a.ambient
    n = s.dim
    W = [list(w) for w in s.dual_rays]  # rows are the w_j
    Winv = inverse(transpose(W))  # t = Winv y
    tg = [tuple(sum((r[i] * u[i] for i in range(n)), Fraction(0)) for r in Winv) for u in a.generators]
    d = lcm_denominators(x for b in s.lattice.dual_basis for x in
                         (sum((r[i] * b[i] for i in range(n)), Fraction(0)) for r in Winv))
    d = max(d, lcm_denominators(x for t in tg for x in t))
    G = [tuple(int(x * d) for x in t) for t in tg]
    # axis intercepts: the generator on ray j has coordinates (0..a_j..0)
    caps = []
    for j in range(n):
        on_axis = [g[j] for g in G if all(g[i] == 0 for i in range(n) if i != j)]
        caps.append(min(on_axis))
    shape = tuple(k * caps[j] for j in range(n - 1))
    cells = int(np.prod(shape)) if shape else 1
    if cells * max(k, 1) * len(G) > budget:
        raise BudgetExceeded(f"enumeration needs about {cells * k * len(G)} cell updates (budget {budget})")
    big = np.iinfo(np.int64).max // 4
    H1 = np.full(shape, big, dtype=np.int64)
    for g in G:
        idx = g[: n - 1]
        if all(i < m for i, m in zip(idx, shape)):
            H1[idx] = min(H1[idx], g[n - 1])
    for ax in range(n - 1):
        H1 = np.minimum.accumulate(H1, axis=ax)
    H = H1
    for _ in range(k - 1):
        Hn = np.full(shape, big, dtype=np.int64)
        for g in G:
            off = g[: n - 1]
            if any(o >= m for o, m in zip(off, shape)):
                continue
            src = tuple(slice(0, m - o) for o, m in zip(off, shape))
            dst = tuple(slice(o, m) for o, m in zip(off, shape))
            np.minimum(Hn[dst], H[src] + g[n - 1], out=Hn[dst])
        H = Hn
    H = np.minimum(H, k * caps[n - 1])
    # which integer s correspond to points of M: y = W^T s / d must pair
    # integrally with the basis of N
    basisN = s.lattice.basis
    # coefficient of s_j in <b, y>: <b, w_j>/d
    C = [[dot(b, W[j]) / d for j in range(n)] for b in basisN]
    cden = lcm_denominators(x for row in C for x in row)
    if cden == 1:
        return int(H.sum())
    Ci = np.array([[int(x * cden) for x in row] for row in C], dtype=np.int64)
    grids = np.meshgrid(*[np.arange(m, dtype=np.int64) for m in shape], indexing="ij") if shape else []
    base = np.zeros((len(basisN),) + shape, dtype=np.int64)
    for j in range(n - 1):
        base += Ci[:, j].reshape((-1,) + (1,) * (n - 1)) * grids[j][None]
    total = 0
    for rho in range(cden):
        val = (base + Ci[:, n - 1].reshape((-1,) + (1,) * (n - 1)) * rho) % cden
        ok = np.all(val == 0, axis=0)
        cnt = np.maximum((H - rho + cden - 1) // cden, 0)
        total += int(np.sum(np.where(ok, cnt, 0)))
    return total


def _colength_bruteforce(a, k, budget):
    """Enumerate M-points under the bounding slab and test membership in a^k."""
    s = a.ambient
    n = s.dim
    gens = ideal_power(a, k).generators
    sdir = tuple(sum((r[i] for r in s.rays), Fraction(0)) for i in range(n))
    top = max(dot(sdir, g) for g in gens)
    region = [(tuple(r), Fraction(0)) for r in s.rays] + [(tuple(-x for x in sdir), -top)]
    pts = dual_lattice_points(s, region, budget)
    if not pts:
        return 0
    den = lcm_denominators(x for p in list(pts) + list(gens) for x in p)
    P = np.array([[int(x * den) for x in p] for p in pts], dtype=np.int64)
    Gm = np.array([[int(x * den) for x in g] for g in gens], dtype=np.int64)
    R = np.array([[int(x * lcm_denominators(r)) for x in r] for r in s.rays], dtype=np.int64)
    PR = P @ R.T
    GR = Gm @ R.T
    inside = np.zeros(len(pts), dtype=bool)
    for g in GR:
        inside |= np.all(PR >= g[None, :], axis=1)
    return int(np.count_nonzero(~inside))


def dual_lattice_points(s: ToricSingularity, halfspaces, budget: int | None = None):
    """All points of M in the bounded polytope {<a, y> >= b}."""
    budget = enum_budget() if budget is None else budget
    P = PolytopeQ.from_halfspaces(halfspaces, s.dim)
    if not P.vertices:
        return []
    D = s.lattice.dual_basis  # columns
    n = s.dim
    Dinv = inverse(transpose([list(c) for c in D]))  # z = Dinv y
    zs = [[sum((r[i] * v[i] for i in range(n)), Fraction(0)) for r in Dinv] for v in P.vertices]
    lo = [math.ceil(min(z[i] for z in zs)) for i in range(n)]
    hi = [math.floor(max(z[i] for z in zs)) for i in range(n)]
    sizes = [max(h - l + 1, 0) for l, h in zip(lo, hi)]
    total = int(np.prod(sizes))
    if total > budget:
        raise BudgetExceeded(f"box of {total} lattice points exceeds budget {budget}")
    if total == 0:
        return []
    grids = np.meshgrid(*[np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo, hi)], indexing="ij")
    Z = np.stack([g.ravel() for g in grids], axis=1)  # (T, n) coordinates in the M basis
    dden = lcm_denominators(x for c in D for x in c)
    Dint = np.array([[int(x * dden) for x in c] for c in D], dtype=np.int64)  # rows = basis vectors
    Y = Z @ Dint  # scaled points: dden * y
    keep = np.ones(len(Y), dtype=bool)
    for a, b in halfspaces:
        aden = lcm_denominators(list(a) + [b])
        ai = np.array([int(Fraction(x) * aden) for x in a], dtype=np.int64)
        keep &= (Y @ ai) >= int(Fraction(b) * aden) * dden
    out = []
    for row in Y[keep]:
        out.append(tuple(Fraction(int(x), dden) for x in row))
    return sorted(out)


# ---------------------------------------------------------------- random ideals


def random_ideal(s: ToricSingularity, rng, max_degree: int = 12, max_gens: int = 6) -> MonomialIdeal:
    """A random finite-colength monomial ideal with generators of degree <= max_degree.

    One generator is placed on every extremal ray of sigma^v (which makes the
    colength finite); the others are random lattice points of the box.
    """
    n = s.dim
    gens = []
    for w in s.dual_rays:
        t = int(rng.integers(1, max(2, max_degree // max(1, int(max(abs(x) for x in w)))) + 1))
        gens.append(tuple(t * x for x in w))
    hb = s.hilbert_basis
    extra = int(rng.integers(0, max_gens - len(gens) + 1)) if max_gens > len(gens) else 0
    for _ in range(extra):
        coeffs = rng.integers(0, 4, size=len(hb))
        u = tuple(sum((int(c) * h[i] for c, h in zip(coeffs, hb)), Fraction(0)) for i in range(n))
        if any(u) and sum(abs(x) for x in u) <= max_degree * n:
            gens.append(u)
    return MonomialIdeal(s, tuple(gens))


__all__ = [
    "MonomialIdeal",
    "NewtonPolyhedron",
    "ToricSingularity",
    "colength",
    "dual_lattice_points",
    "ideal_power",
    "ideal_product",
    "lct_monomial",
    "lct_with_weight",
    "maximal_ideal",
    "mult_monomial",
    "random_ideal",
]
