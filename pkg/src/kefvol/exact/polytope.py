"""Exact convex polytopes (and the polyhedra needed around them).

Conversions between the vertex and halfspace descriptions are brute force
over d-subsets, which is fine for the sizes met here (dimension <= 4, at most
a few dozen generators).  The heavy inner loops run on integer numpy arrays:
rational input is scaled to integers first, so every candidate normal and
every sidedness test is exact.  When entries could overflow int64 the same
code runs on Python integers (``dtype=object``).

Halfspaces are always read as ``<a, x> >= b``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from ..errors import Infeasible, UnboundedPolytope
from .linalg import affine_rank, int_det, nullspace, rank, _echelon
from .lp import lp_minimize
from .rational import lcm_denominators

_INT64_SAFE = 2 ** 62


# ---------------------------------------------------------------- integer kernels


def _batched_det(a):
    """Determinants of a stack of m x m matrices, shape (T, m, m), by cofactors."""
    t, m = a.shape[0], a.shape[1]
    if m == 0:
        return np.ones(t, dtype=a.dtype)
    if m == 1:
        return a[:, 0, 0].copy()
    if m == 2:
        return a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]
    out = np.zeros(t, dtype=a.dtype)
    for k in range(m):
        minor = np.delete(a[:, 1:, :], k, axis=2)
        term = a[:, 0, k] * _batched_det(minor)
        out = out + term if k % 2 == 0 else out - term
    return out


def _batched_normals(v):
    """Generalized cross products of stacks of (d-1) vectors in Z^d."""
    t, _, d = v.shape
    out = np.empty((t, d), dtype=v.dtype)
    for j in range(d):
        minor = np.delete(v, j, axis=2)
        det = _batched_det(minor)
        out[:, j] = det if j % 2 == 0 else -det
    return out


def _needs_bigint(maxabs: int, d: int) -> bool:
    return math.factorial(max(d, 1)) * max(maxabs, 1) ** max(d, 1) * 4 >= _INT64_SAFE


def _as_int_array(rows, d):
    maxabs = max((abs(int(x)) for r in rows for x in r), default=0)
    dtype = object if _needs_bigint(maxabs, d) else np.int64
    return np.array([[int(x) for x in r] for r in rows], dtype=dtype).reshape(len(rows), d)


def _scale_points(points):
    den = lcm_denominators(x for p in points for x in p)
    return den, [[int(Fraction(x) * den) for x in p] for p in points]


def _primitive_rows(normals):
    """Divide each integer row by the gcd of its entries (rows nonzero)."""
    out = []
    for row in normals:
        g = 0
        for x in row:
            g = math.gcd(g, int(x))
        out.append(tuple(int(x) // g for x in row))
    return out


def hull_facets(points, directions=()):
    """Facets of conv(points) + cone(directions), assumed full-dimensional.

    Returns a sorted list of ``(normal, offset)`` with primitive integer
    normals and rational offsets, meaning ``<normal, x> >= offset`` on the
    region.  Directions are only used through their rays, so they may be
    rescaled freely.
    """
    pts = [tuple(Fraction(x) for x in p) for p in points]
    if not pts:
        raise ValueError("need at least one point")
    d = len(pts[0])
    den, ipts = _scale_points(pts)
    dirs = []
    for r in directions:
        rd = lcm_denominators(r)
        dirs.append([int(Fraction(x) * rd) for x in r])
    if d == 1:
        lo = min(p[0] for p in pts)
        hi = max(p[0] for p in pts)
        out = []
        if not any(r[0] < 0 for r in dirs):
            out.append(((1,), lo))
        if not any(r[0] > 0 for r in dirs):
            out.append(((-1,), -hi))
        return sorted(out)
    maxabs = max((abs(x) for r in ipts + dirs for x in r), default=1)
    dtype = object if _needs_bigint(2 * maxabs, d) else np.int64
    P = np.array(ipts, dtype=dtype).reshape(len(ipts), d)
    D = np.array(dirs, dtype=dtype).reshape(len(dirs), d)
    found = set()
    for s in range(1, d + 1):
        if s > len(ipts) or d - s > len(dirs):
            continue
        pcombos = list(itertools.combinations(range(len(ipts)), s))
        dcombos = list(itertools.combinations(range(len(dirs)), d - s))
        for chunk_start in range(0, len(pcombos), 4096):
            pc = np.array(pcombos[chunk_start:chunk_start + 4096], dtype=np.int64).reshape(-1, s)
            anchors = P[pc[:, 0]]
            diffs = P[pc[:, 1:]] - anchors[:, None, :]  # (T, s-1, d)
            for dc in dcombos:
                if dc:
                    dv = np.broadcast_to(D[list(dc)], (len(pc), d - s, d))
                    vecs = np.concatenate([diffs, dv], axis=1)
                else:
                    vecs = diffs
                normals = _batched_normals(vecs)
                nz = np.any(normals != 0, axis=1)
                if not np.any(nz):
                    continue
                normals = normals[nz]
                anc = anchors[nz]
                c0 = np.sum(normals * anc, axis=1)
                vals = P @ normals.T  # (k, T)
                pos = np.all(vals >= c0, axis=0)
                neg = np.all(vals <= c0, axis=0)
                if len(dirs):
                    dv_vals = D @ normals.T
                    pos &= np.all(dv_vals >= 0, axis=0)
                    neg &= np.all(dv_vals <= 0, axis=0)
                for idx in np.nonzero(pos | neg)[0]:
                    sign = 1 if pos[idx] else -1
                    found.add(tuple(sign * int(x) for x in normals[idx]))
    out = []
    seen = set()
    for nrm in _primitive_rows(sorted(found)):
        if nrm in seen:
            continue
        seen.add(nrm)
        off = min(sum(a * b for a, b in zip(nrm, p)) for p in ipts)
        out.append((nrm, Fraction(off, den)))
    return sorted(out)


def enumerate_vertices(halfspaces, d: int):
    """Vertices of {x : <a,x> >= b} by brute force over d-subsets (exact)."""
    rows = []
    for a, b in halfspaces:
        a = [Fraction(x) for x in a]
        b = Fraction(b)
        den = lcm_denominators(a + [b])
        rows.append([int(x * den) for x in a] + [int(b * den)])
    if len(rows) < d:
        return []
    H = _as_int_array(rows, d + 1)
    A = H[:, :d]
    B = H[:, d]
    combos = np.array(list(itertools.combinations(range(len(rows)), d)), dtype=np.int64)
    verts = set()
    for start in range(0, len(combos), 8192):
        cb = combos[start:start + 8192]
        # homogeneous system [A | -b] (x, 1) = 0: the generalized cross product
        sub = np.concatenate([A[cb], -B[cb][:, :, None]], axis=2)  # (T, d, d+1)
        hom = _batched_normals(sub)
        w = hom[:, d]
        ok = w != 0
        hom = hom[ok]
        w = w[ok]
        sgn = np.where(w > 0, 1, -1)
        num = hom[:, :d] * sgn[:, None]
        wabs = w * sgn
        # feasibility: A num >= B wabs
        feas = np.all(A @ num.T >= B[:, None] * wabs[None, :], axis=0)
        for i in np.nonzero(feas)[0]:
            verts.add(tuple(Fraction(int(num[i, j]), int(wabs[i])) for j in range(d)))
    return sorted(verts)


# ---------------------------------------------------------------- polytope type


@dataclass(frozen=True)
class PolytopeQ:
    """A bounded convex polytope in Q^dim with both V- and H-descriptions.

    ``halfspaces`` are pairs ``(normal, offset)`` meaning ``<normal, x> >= offset``.
    For lower-dimensional polytopes the H-description contains the defining
    equations as pairs of opposite halfspaces.
    """

    vertices: tuple
    halfspaces: tuple
    dim: int

    @classmethod
    def empty(cls, dim: int) -> "PolytopeQ":
        one = tuple(Fraction(int(i == 0)) for i in range(dim))
        return cls((), ((one, Fraction(1)), (tuple(-x for x in one), Fraction(0))), dim)

    @classmethod
    def from_vertices(cls, points) -> "PolytopeQ":
        pts = sorted({tuple(Fraction(x) for x in p) for p in points})
        if not pts:
            raise ValueError("need at least one point (use PolytopeQ.empty)")
        d = len(pts[0])
        r = affine_rank(pts)
        if r == d:
            facets = hull_facets(pts)
            verts = _vertices_from_incidence(pts, facets, d)
            hs = tuple((tuple(Fraction(x) for x in a), b) for a, b in facets)
            return cls(tuple(verts), hs, d)
        return cls._lower_dim(pts, r, d)

    @classmethod
    def _lower_dim(cls, pts, r, d):
        p0 = pts[0]
        diffs = [[x - y for x, y in zip(p, p0)] for p in pts[1:]]
        eqs = []
        for nv in nullspace(diffs, d) if diffs else nullspace([], d):
            den = lcm_denominators(nv)
            nrm = tuple(Fraction(int(x * den)) for x in nv)
            off = sum((a * b for a, b in zip(nrm, p0)), Fraction(0))
            eqs.append((nrm, off))
            eqs.append((tuple(-x for x in nrm), -off))
        if r == 0:
            return cls((p0,), tuple(eqs), d)
        _, piv = _echelon(diffs)
        proj = [tuple(p[c] for c in piv) for p in pts]
        facets = hull_facets(proj)
        keep = _vertices_from_incidence(proj, facets, r)
        keep_set = set(keep)
        verts = [p for p, q in zip(pts, proj) if q in keep_set]
        hs = list(eqs)
        for a, b in facets:
            lifted = [Fraction(0)] * d
            for c, x in zip(piv, a):
                lifted[c] = Fraction(x)
            hs.append((tuple(lifted), b))
        return cls(tuple(sorted(set(verts))), tuple(hs), d)

    @classmethod
    def from_halfspaces(cls, halfspaces, dim: int | None = None) -> "PolytopeQ":
        hs = [(tuple(Fraction(x) for x in a), Fraction(b)) for a, b in halfspaces]
        if dim is None:
            if not hs:
                raise ValueError("dimension required for an empty halfspace list")
            dim = len(hs[0][0])
        d = dim
        if rank([a for a, _ in hs]) < d:
            try:
                lp_minimize([0] * d, hs, lex=False)
            except Infeasible:
                return cls.empty(d)
            raise UnboundedPolytope("halfspace system has a lineality direction")
        verts = enumerate_vertices(hs, d)
        if not verts:
            return cls.empty(d)
        # pointed and nonempty: bounded iff the recession cone is {0}
        rec = [(a, Fraction(0)) for a, _ in hs]
        total = tuple(sum((a[i] for a, _ in hs), Fraction(0)) for i in range(d))
        try:
            lp_minimize([0] * d, rec + [(total, Fraction(1))], lex=False)
        except Infeasible:
            pass
        else:
            raise UnboundedPolytope("halfspace system is unbounded")
        return cls.from_vertices(verts)

    @cached_property
    def affine_dim(self) -> int:
        return affine_rank(list(self.vertices))

    def contains(self, x) -> bool:
        return all(sum((Fraction(a) * Fraction(y) for a, y in zip(nrm, x)), Fraction(0)) >= b
                   for nrm, b in self.halfspaces)

    def triangulation(self) -> list[tuple]:
        """Pulling triangulation: simplices as tuples of vertex indices."""
        if self.affine_dim < self.dim:
            return []
        verts = list(self.vertices)
        inc = []
        for nrm, b in self.halfspaces:
            inc.append(frozenset(i for i, v in enumerate(verts)
                                 if sum((a * x for a, x in zip(nrm, v)), Fraction(0)) == b))
        return pulling_triangulation(range(len(verts)), self.dim, verts, inc)

    def volume(self) -> Fraction:
        return polytope_volume(self)


def _vertices_from_incidence(pts, facets, d):
    out = []
    for p in pts:
        tight = [a for a, b in facets if sum((Fraction(x) * y for x, y in zip(a, p)), Fraction(0)) == b]
        if len(tight) >= d and rank(tight) == d:
            out.append(p)
    return sorted(out)


def pulling_triangulation(face, dim, verts, inc, rank_key=None, memo=None):
    """Pulling triangulation of a face given by vertex indices.

    ``inc`` lists the vertex-index sets of all facets of the ambient
    polyhedron; faces of ``face`` are its intersections with them.  The apex
    at every level is the smallest vertex under ``rank_key`` (default: the
    lexicographic order of coordinates).  Returns tuples of vertex indices.
    """
    if memo is None:
        memo = {}
    if rank_key is None:
        def rank_key(i):
            return verts[i]
    face = frozenset(face)
    if face in memo:
        return memo[face]
    if dim == 0:
        res = [(next(iter(face)),)]
        memo[face] = res
        return res
    apex = min(face, key=rank_key)
    subs = set()
    for f in inc:
        sub = face & f
        if apex in sub or sub == face or len(sub) < dim:
            continue
        subs.add(sub)
    res = []
    for sub in sorted(subs, key=sorted):
        if affine_rank([verts[i] for i in sub]) != dim - 1:
            continue
        for simp in pulling_triangulation(sub, dim - 1, verts, inc, rank_key, memo):
            res.append((apex,) + simp)
    memo[face] = res
    return res


def simplex_volume(points) -> Fraction:
    """Euclidean volume of the simplex spanned by d+1 points in Q^d."""
    p0 = points[0]
    d = len(p0)
    den = lcm_denominators(x for p in points for x in p)
    rows = [[int((Fraction(x) - Fraction(y)) * den) for x, y in zip(p, p0)] for p in points[1:]]
    return Fraction(abs(int_det(rows)), den ** d * math.factorial(d))


def polytope_volume(P: PolytopeQ) -> Fraction:
    """Exact volume; 0 for empty or lower-dimensional polytopes."""
    if not P.vertices or P.affine_dim < P.dim:
        return Fraction(0)
    verts = P.vertices
    total = Fraction(0)
    for simp in P.triangulation():
        total += simplex_volume([verts[i] for i in simp])
    return total
