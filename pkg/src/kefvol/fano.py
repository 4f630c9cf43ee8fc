"""Toric Q-Fano models, marked points and blow-up volume functions.

A toric model is a complete fan with primitive rays v_i in a lattice N.  Its
anticanonical moment polytope is P = {y in M_R : <v_i, y> >= -1}, so the
Gorenstein point is the origin and (-K)^n = n! vol(P) / covol(M).

At a vertex y0 of P the tangent cone y0 + sigma^v is the dual cone of the
local affine chart, with m_sigma = -y0.  A monomial ideal a of that chart
gives the volume function

    vol(sigma^*(-K) - xF) = n! vol(P ∩ (y0 + x Newt(a))) / covol(M),

where x Newt(a) = {<xi_F, y> >= x c_F} over the facets of Newt(a).  It is a
piecewise polynomial in x, computed exactly in :mod:`kefvol.piecewise`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import (
    BarycenterWarning,
    InfiniteColength,
    InvalidModel,
    MissingGroup,
    PointMismatch,
    UnboundedPolytope,
)
from .exact.cyclotomic import CycNum, zeta
from .exact.lattice import Lattice
from .exact.linalg import affine_rank, det, integer_kernel, inverse, rank, solve, transpose
from .exact.polytope import PolytopeQ, polytope_volume, simplex_volume
from .exact.rational import dot
from .molien import (
    FiniteMatrixGroup,
    group_closure,
    identity_matrix,
    root_of_unity_exponent,
    scalar_subgroup_order,
)
from .monomial import MonomialIdeal, ToricSingularity, lct_monomial, mult_monomial
from .piecewise import PiecewisePolynomial, piecewise_volume, poly_eval
from .valuation import MonomialValuation, log_discrepancy, vol_valuation

KINDS = ("projective_space", "weighted_projective", "toric_polytope", "quotient_pn")


def _unit(n, i):
    return tuple(Fraction(int(i == j)) for j in range(n))


# ---------------------------------------------------------------- models


@dataclass(frozen=True)
class FanoModel:
    """A Q-Fano model.

    ``lattice`` (N), ``rays`` and ``polytope`` hold the toric data and are None
    only for a non-diagonal quotient_pn.  ``params`` records the constructor
    input (n, weights, or the vertex list of the given polytope).
    """

    kind: str
    n: int
    params: tuple
    lattice: Lattice | None
    rays: tuple | None
    polytope: PolytopeQ | None
    group: FiniteMatrixGroup | None = None
    kss_flag: bool = False
    label: str = field(default="", compare=False)

    @property
    def is_toric(self) -> bool:
        return self.polytope is not None

    def vertices(self) -> tuple:
        self._require_toric()
        return self.polytope.vertices

    def _require_toric(self):
        if not self.is_toric:
            raise InvalidModel(f"{self.label or self.kind} has no toric description")

    def __repr__(self):
        return f"FanoModel({self.label or self.kind}, n={self.n})"


def _moment_polytope(rays, n):
    hs = [(v, Fraction(-1)) for v in rays]
    try:
        P = PolytopeQ.from_halfspaces(hs, n)
    except UnboundedPolytope as exc:
        raise InvalidModel("the fan is not complete") from exc
    if P.affine_dim < n:
        raise InvalidModel("moment polytope is not full-dimensional")
    return P


def _toric_model(kind, n, params, lattice, rays, kss_flag, label, group=None):
    prim = tuple(sorted({lattice.primitive(tuple(Fraction(x) for x in r)) for r in rays}))
    if rank(prim) < n:
        raise InvalidModel("rays do not span")
    P = _moment_polytope(prim, n)
    # every ray must define a facet of P
    for v in prim:
        face = [y for y in P.vertices if dot(v, y) == -1]
        if not face or affine_rank(face) != n - 1:
            raise InvalidModel(f"ray {v} does not define a facet of the moment polytope")
    return FanoModel(kind, n, params, lattice, prim, P, group, bool(kss_flag), label)


def projective_space(n: int, kss_flag: bool = True) -> FanoModel:
    """P^n with rays e_1, ..., e_n, -(e_1 + ... + e_n)."""
    n = int(n)
    if n < 1:
        raise InvalidModel("dimension must be positive")
    rays = [_unit(n, i) for i in range(n)] + [tuple(Fraction(-1) for _ in range(n))]
    return _toric_model("projective_space", n, (n,), Lattice.standard(n), rays, kss_flag, f"P^{n}")


def weighted_projective(weights, kss_flag: bool | None = None) -> FanoModel:
    """P(q_0, ..., q_n).

    M is the integer kernel of q in Z^(n+1); with a basis b_1..b_n of it as
    coordinates, the ray of the i-th coordinate divisor is (b_j[i])_j, taken
    primitive in N = Z^n.  The kss flag defaults to "all weights equal".
    """
    q = [int(w) for w in weights]
    if len(q) < 2 or any(w <= 0 for w in q):
        raise InvalidModel("weights must be at least two positive integers")
    if math.gcd(*q) != 1:
        raise InvalidModel("weights must have gcd 1")
    n = len(q) - 1
    basis = integer_kernel(q)
    rays = [tuple(Fraction(b[i]) for b in basis) for i in range(n + 1)]
    if kss_flag is None:
        kss_flag = len(set(q)) == 1
    label = f"P({','.join(map(str, q))})"
    return _toric_model("weighted_projective", n, tuple(q), Lattice.standard(n), rays, kss_flag, label)


def toric_polytope(P, lattice: Lattice | None = None, kss_flag: bool = False, label: str = "") -> FanoModel:
    """The toric Fano whose anticanonical polytope is P (vertices in M_R).

    Facet normals are taken primitive in N (``lattice``, default Z^n); P is
    translated so that its unique point at lattice distance 1 from every facet
    becomes the origin.
    """
    if not isinstance(P, PolytopeQ):
        P = PolytopeQ.from_vertices(P)
    n = P.dim
    if P.affine_dim < n:
        raise InvalidModel("polytope is not full-dimensional")
    lattice = lattice or Lattice.standard(n)
    if lattice.ambient_dim != n:
        raise InvalidModel("lattice and polytope dimensions differ")
    normals, rhs = [], []
    for a, b in P.halfspaces:
        v = lattice.primitive(a)
        lam = next(x / y for x, y in zip(v, a) if y != 0)
        normals.append(v)
        rhs.append(lam * b + 1)
    # Gorenstein point g: <v_i, g> = c_i + 1 for all facets
    idx = []
    for i in range(len(normals)):
        if rank([normals[j] for j in idx + [i]]) > len(idx):
            idx.append(i)
        if len(idx) == n:
            break
    g = solve([normals[i] for i in idx], [rhs[i] for i in idx])
    if g is None or any(dot(v, g) != c for v, c in zip(normals, rhs)):
        raise InvalidModel("no point at lattice distance 1 from every facet")
    params = tuple(P.vertices)
    return _toric_model("toric_polytope", n, params, lattice, normals, kss_flag, label or "toric")


def _cyc_rank(mat) -> int:
    """Rank of a CycNum matrix by Gaussian elimination."""
    m = [[x if isinstance(x, CycNum) else CycNum.rational(x) for x in row] for row in mat]
    rows, cols = len(m), len(m[0]) if m else 0
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if not m[i][c].is_zero()), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        for i in range(r + 1, rows):
            if not m[i][c].is_zero():
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
    return r


def _is_reflection(g) -> bool:
    n = len(g)
    diff = [[g[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    return _cyc_rank(diff) == 1


def quotient_pn(G: FiniteMatrixGroup, kss_flag: bool | None = None, label: str = "") -> FanoModel:
    """P^n / G for a small G ⊂ GL(n), acting on the first n homogeneous coordinates.

    The point [0:...:0:1] is a quotient singularity C^n/G.  A diagonal G also
    gets toric data: N = Z^n + sum of the exponent vectors of its elements.

    The default flag is d = 1 (d = |G ∩ scalars|): a nontrivial scalar acts on
    P^n as a reflection in the first coordinate, so for d > 1 the quotient is
    branched along a divisor (P^2/mu_2 = P(1,1,2)) and does not inherit
    K-semistability from P^n.
    """
    n = G.n
    for g in G.elements:
        if _is_reflection(g):
            raise InvalidModel("G contains a pseudo-reflection")
    if kss_flag is None:
        kss_flag = scalar_subgroup_order(G) == 1
    label = label or f"P^{n}/{G.label or 'G'}"
    if not G.is_diagonal():
        return FanoModel("quotient_pn", n, (n,), None, None, None, G, bool(kss_flag), label)
    gens = [_unit(n, i) for i in range(n)]
    for g in G.elements:
        vec = []
        for i in range(n):
            k, big = root_of_unity_exponent(g[i][i])
            vec.append(Fraction(k, big))
        gens.append(tuple(vec))
    lattice = Lattice.spanned_by(gens, n)
    rays = [_unit(n, i) for i in range(n)] + [tuple(Fraction(-1) for _ in range(n))]
    return _toric_model("quotient_pn", n, (n,), lattice, rays, kss_flag, label, group=G)


def anticanonical_volume(m: FanoModel) -> Fraction:
    """(-K_X)^n; for quotient_pn the closed form (n+d)^n / |G|."""
    if m.kind == "quotient_pn":
        d = scalar_subgroup_order(m.group)
        return Fraction((m.n + d) ** m.n, m.group.order)
    return toric_anticanonical_volume(m)


def toric_anticanonical_volume(m: FanoModel) -> Fraction:
    """n! vol(P) / covol(M) from the moment polytope."""
    m._require_toric()
    return math.factorial(m.n) * polytope_volume(m.polytope) / m.lattice.dual_covolume


def barycenter(m: FanoModel) -> tuple:
    """Exact barycenter of the moment polytope (origin = Gorenstein point)."""
    m._require_toric()
    P = m.polytope
    verts = list(P.vertices)
    total = Fraction(0)
    acc = [Fraction(0)] * m.n
    for simp in P.triangulation():
        pts = [verts[i] for i in simp]
        vol = simplex_volume(pts)
        total += vol
        for j in range(m.n):
            acc[j] += vol * sum(p[j] for p in pts) / (m.n + 1)
    return tuple(x / total for x in acc)


def barycenter_check(m: FanoModel) -> bool:
    """Whether the barycenter vanishes; warns when this disagrees with the kss flag.

    For toric Fano varieties a vanishing barycenter is equivalent to
    K-semistability, but the flag stays the user's input.
    """
    zero = all(x == 0 for x in barycenter(m))
    if zero != m.kss_flag:
        warnings.warn(
            f"{m.label}: kss_flag={m.kss_flag} but barycenter {'is' if zero else 'is not'} zero",
            BarycenterWarning,
            stacklevel=2,
        )
    return zero


# ---------------------------------------------------------------- marked points


@dataclass(frozen=True)
class MarkedPoint:
    """A torus-fixed point: a vertex of the moment polytope with its local chart."""

    model: FanoModel
    vertex: tuple
    local: ToricSingularity

    @property
    def n(self) -> int:
        return self.model.n

    def __repr__(self):
        return f"MarkedPoint({self.model.label}, {tuple(str(x) for x in self.vertex)}, {self.local.label})"


def marked_point(m: FanoModel, vertex) -> MarkedPoint:
    m._require_toric()
    y0 = tuple(Fraction(x) for x in vertex)
    if y0 not in m.polytope.vertices:
        raise PointMismatch(f"{y0} is not a vertex of the moment polytope")
    tight = [v for v in m.rays if dot(v, y0) == -1]
    local = ToricSingularity.from_rays(tight, m.lattice, label=f"{m.label}@{','.join(str(x) for x in y0)}")
    if tuple(-x for x in y0) != local.gorenstein_covector:
        raise ArithmeticError("local Gorenstein covector differs from -vertex")
    return MarkedPoint(m, y0, local)


def marked_points(m: FanoModel) -> list[MarkedPoint]:
    return [marked_point(m, v) for v in m.vertices()]


def singular_points(m: FanoModel) -> list[MarkedPoint]:
    """Marked points whose local chart is not smooth."""
    out = []
    for p in marked_points(m):
        s = p.local
        if not s.is_simplicial or _cone_index(s) != 1:
            out.append(p)
    return out


def _cone_index(s: ToricSingularity) -> Fraction:
    """[N : sum Z v_i] for a simplicial cone (1 iff smooth)."""
    return abs(det(s.rays)) / s.lattice.index


def quotient_point(m: FanoModel) -> MarkedPoint:
    """For quotient_pn with toric data: the image of [0:...:0:1], the vertex (-1,...,-1)."""
    if m.kind != "quotient_pn":
        raise InvalidModel("not a quotient_pn model")
    return marked_point(m, tuple(Fraction(-1) for _ in range(m.n)))


def local_group(s: ToricSingularity) -> FiniteMatrixGroup:
    """The diagonal group N / (sum Z v_i) of a simplicial toric chart, acting on C^n."""
    if not s.is_simplicial:
        raise MissingGroup("the local cone is not simplicial")
    n = s.dim
    to_rays = inverse(transpose([list(r) for r in s.rays]))  # N coords -> ray coords
    gens = []
    for b in s.lattice.basis:
        c = [sum((a * x for a, x in zip(row, b)), Fraction(0)) for row in to_rays]
        den = 1
        for x in c:
            den = den * x.denominator // math.gcd(den, x.denominator)
        gens.append([[zeta(den, int(c[i] * den) % den) if i == j else 0 for j in range(n)] for i in range(n)])
    if not gens:
        gens = [identity_matrix(n)]
    return group_closure(gens, label=f"local({s.label})")


# ---------------------------------------------------------------- volume functions


def _check_ideal(mp: MarkedPoint, a: MonomialIdeal):
    if a.ambient != mp.local:
        raise PointMismatch("the ideal does not live on the chart of the marked point")


def _scale(mp: MarkedPoint) -> Fraction:
    return Fraction(math.factorial(mp.n)) / mp.model.lattice.dual_covolume


def _blowup_constraints(mp: MarkedPoint, a: MonomialIdeal):
    cons = [(v, Fraction(-1), Fraction(0)) for v in mp.model.rays]
    for xi, c in a.newton.compact_facets():
        cons.append((xi, dot(xi, mp.vertex), c))
    return cons


def volume_function(mp: MarkedPoint, a: MonomialIdeal, x) -> Fraction:
    """vol(sigma^*(-K) - xF) by a single exact polytope volume."""
    _check_ideal(mp, a)
    x = Fraction(x)
    if x < 0:
        raise ValueError("x must be nonnegative")
    hs = [(v, c0 + x * c1) for v, c0, c1 in _blowup_constraints(mp, a)]
    return _scale(mp) * polytope_volume(PolytopeQ.from_halfspaces(hs, mp.n))


@lru_cache(maxsize=256)
def volume_piecewise(mp: MarkedPoint, a: MonomialIdeal) -> PiecewisePolynomial:
    """The whole volume function as an exact piecewise polynomial on [0, inf)."""
    _check_ideal(mp, a)
    return piecewise_volume(_blowup_constraints(mp, a), mp.n, _scale(mp))


def _require_finite(a: MonomialIdeal):
    if not a.is_finite_colength() or a.is_trivial():
        raise InfiniteColength("the ideal must have finite colength at the marked point")


def seshadri_constant(mp: MarkedPoint, a: MonomialIdeal) -> Fraction:
    """Largest x such that the volume equals (L^n) - mult x^n on all of [0, x]."""
    _check_ideal(mp, a)
    _require_finite(a)
    pw = volume_piecewise(mp, a)
    n = mp.n
    target = [Fraction(0)] * (n + 1)
    target[0] = anticanonical_volume(mp.model)
    target[n] -= mult_monomial(a)
    target = tuple(target)
    eps = Fraction(0)
    for i, piece in enumerate(pw.pieces):
        if piece != target:
            break
        if i + 1 >= len(pw.breakpoints):
            raise ArithmeticError("volume polynomial holds on an unbounded interval")
        eps = pw.breakpoints[i + 1]
    return eps


def beta_invariant(mp: MarkedPoint, a: MonomialIdeal) -> Fraction:
    """lct(a) (-K)^n - integral_0^inf vol(sigma^*(-K) - xF) dx, exactly."""
    _check_ideal(mp, a)
    _require_finite(a)
    pw = volume_piecewise(mp, a)
    return lct_monomial(a) * anticanonical_volume(mp.model) - pw.integral()


def volume_samples(mp: MarkedPoint, a: MonomialIdeal, xs) -> list[tuple]:
    """[(x, vol(x), (L^n) - mult x^n)] for plotting and the lower-bound check."""
    pw = volume_piecewise(mp, a)
    L = anticanonical_volume(mp.model)
    e = mult_monomial(a)
    return [(Fraction(x), pw(x), L - e * Fraction(x) ** mp.n) for x in xs]


# ---------------------------------------------------------------- filtrations


@dataclass(frozen=True)
class FiltrationProfile:
    """t -> vol(F_v S^(t)) = n! vol(P ∩ {<xi, y - y0> >= t}) / covol(M)."""

    marked: MarkedPoint
    valuation: MonomialValuation
    breakpoints: tuple
    piece_polynomials: tuple

    @property
    def function(self) -> PiecewisePolynomial:
        return PiecewisePolynomial(self.breakpoints, self.piece_polynomials)

    def __call__(self, t) -> Fraction:
        return self.function(t)

    def integral(self) -> Fraction:
        return self.function.integral()


def _check_valuation(mp: MarkedPoint, v: MonomialValuation):
    if v.ambient != mp.local:
        raise PointMismatch("the valuation does not live on the chart of the marked point")


@lru_cache(maxsize=256)
def filtration_profile(mp: MarkedPoint, v: MonomialValuation) -> FiltrationProfile:
    _check_valuation(mp, v)
    cons = [(r, Fraction(-1), Fraction(0)) for r in mp.model.rays]
    cons.append((v.weight, dot(v.weight, mp.vertex), Fraction(1)))
    pw = piecewise_volume(cons, mp.n, _scale(mp))
    return FiltrationProfile(mp, v, pw.breakpoints, pw.pieces)


@dataclass(frozen=True)
class FujitaReport:
    lhs: Fraction
    rhs: Fraction
    holds: bool
    equality: bool


def fujita_filtration_check(mp: MarkedPoint, v: MonomialValuation) -> FujitaReport:
    """A(v) >= (1/(-K)^n) integral_0^inf vol(F_v S^(t)) dt, with r = 1."""
    prof = filtration_profile(mp, v)
    lhs = log_discrepancy(v)
    rhs = prof.integral() / anticanonical_volume(mp.model)
    return FujitaReport(lhs, rhs, lhs >= rhs, lhs == rhs)


def filtration_lower_bound(mp: MarkedPoint, v: MonomialValuation) -> float:
    """integral of max{(L^n) - vol(v) t^n, 0} = (n/(n+1)) (L^n) ((L^n)/vol(v))^(1/n)."""
    _check_valuation(mp, v)
    n = mp.n
    L = float(anticanonical_volume(mp.model))
    return n / (n + 1) * L * (L / float(vol_valuation(v))) ** (1.0 / n)


def profile_value_check(prof: FiltrationProfile) -> bool:
    """Invariants: value (-K)^n at 0, zero tail, continuity and monotonicity at breakpoints."""
    f = prof.function
    L = anticanonical_volume(prof.marked.model)
    if f(0) != L or any(prof.piece_polynomials[-1]):
        return False
    for i, b in enumerate(prof.breakpoints[1:], start=1):
        if poly_eval(prof.piece_polynomials[i - 1], b) != poly_eval(prof.piece_polynomials[i], b):
            return False
    return True


__all__ = [
    "FanoModel",
    "FiltrationProfile",
    "FujitaReport",
    "KINDS",
    "MarkedPoint",
    "anticanonical_volume",
    "barycenter",
    "barycenter_check",
    "beta_invariant",
    "filtration_lower_bound",
    "filtration_profile",
    "fujita_filtration_check",
    "local_group",
    "marked_point",
    "marked_points",
    "projective_space",
    "quotient_pn",
    "quotient_point",
    "seshadri_constant",
    "singular_points",
    "toric_anticanonical_volume",
    "toric_polytope",
    "volume_function",
    "volume_piecewise",
    "volume_samples",
    "weighted_projective",
]
