"""Exact piecewise-polynomial volumes of polytopes with moving facets.

For a family P(x) = {y : <a_i, y> >= c0_i + x c1_i} the volume is a piecewise
polynomial of degree <= n in x whose pieces can only change where some vertex
of the hyperplane arrangement, moving linearly in x, hits another hyperplane
while staying feasible.  We collect all such events, and on every interval
between consecutive events interpolate the volume polynomial from n+1 exact
samples (checked against one more sample).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .exact.linalg import inverse, rank
from .exact.polytope import PolytopeQ, polytope_volume
from .exact.rational import dot


def poly_eval(coeffs, x):
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def poly_trim(coeffs):
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_antiderivative(coeffs):
    return (Fraction(0),) + tuple(Fraction(c) / (k + 1) for k, c in enumerate(coeffs))


def interpolate(xs, ys):
    """Coefficients (low degree first) of the interpolating polynomial."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        # Lagrange basis polynomial for node i
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xs[j] * basis[k + 1]
            denom *= xs[i] - xs[j]
        f = ys[i] / denom
        for k in range(n):
            coeffs[k] += f * basis[k]
    return poly_trim(coeffs)


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Piece i lives on [b_i, b_(i+1)]; the last piece on [b_k, infinity)."""

    breakpoints: tuple
    pieces: tuple

    def piece_index(self, x) -> int:
        x = Fraction(x)
        idx = 0
        for i, b in enumerate(self.breakpoints):
            if x >= b:
                idx = i
        return idx

    def __call__(self, x) -> Fraction:
        return poly_eval(self.pieces[self.piece_index(x)], Fraction(x))

    def integral(self, lo=0, hi=None) -> Fraction:
        """Exact integral over [lo, hi] (hi=None: to infinity, last piece must vanish)."""
        lo = Fraction(lo)
        if hi is None and any(self.pieces[-1]):
            raise ValueError("integral to infinity of a non-vanishing tail")
        total = Fraction(0)
        bps = list(self.breakpoints) + [None]
        for i, p in enumerate(self.pieces):
            a, b = bps[i], bps[i + 1]
            a = max(a, lo)
            if hi is not None:
                b = Fraction(hi) if b is None else min(b, Fraction(hi))
            if b is None or b <= a:
                continue
            anti = poly_antiderivative(p)
            total += poly_eval(anti, b) - poly_eval(anti, a)
        return total

    def support_end(self) -> Fraction:
        """First breakpoint after which the function is identically zero."""
        end = self.breakpoints[-1]
        for i in range(len(self.pieces) - 1, -1, -1):
            if any(self.pieces[i]):
                return self.breakpoints[i + 1] if i + 1 < len(self.breakpoints) else end
        return self.breakpoints[0]


def _events(constraints, n):
    """All x >= 0 where a feasible arrangement vertex meets another hyperplane."""
    events = set()
    normals = [a for a, _, _ in constraints]
    for subset in itertools.combinations(range(len(constraints)), n):
        rows = [normals[i] for i in subset]
        if rank(rows) < n:
            continue
        inv = inverse(rows)
        c0 = [constraints[i][1] for i in subset]
        c1 = [constraints[i][2] for i in subset]
        ya = tuple(sum((r[k] * c0[k] for k in range(n)), Fraction(0)) for r in inv)
        yb = tuple(sum((r[k] * c1[k] for k in range(n)), Fraction(0)) for r in inv)
        for j, (a, d0, d1) in enumerate(constraints):
            if j in subset:
                continue
            alpha = dot(a, ya) - d0
            beta = dot(a, yb) - d1
            if beta == 0:
                continue
            x = -alpha / beta
            if x <= 0 or x in events:
                continue
            y = tuple(p + x * q for p, q in zip(ya, yb))
            if all(dot(b, y) >= e0 + x * e1 for b, e0, e1 in constraints):
                events.add(x)
    return sorted(events)


def piecewise_volume(constraints, n: int, scale=1, x0=0) -> PiecewisePolynomial:
    """Volume of {y : <a, y> >= c0 + x c1} as an exact piecewise polynomial on [x0, inf).

    ``constraints`` are triples (a, c0, c1); ``scale`` multiplies every volume.
    The set must be bounded for every x >= x0.
    """
    cons = [(tuple(Fraction(v) for v in a), Fraction(c0), Fraction(c1)) for a, c0, c1 in constraints]
    scale = Fraction(scale)
    x0 = Fraction(x0)

    def volume_at(x):
        hs = [(a, c0 + x * c1) for a, c0, c1 in cons]
        return scale * polytope_volume(PolytopeQ.from_halfspaces(hs, n))

    bps = [x0] + [e for e in _events(cons, n) if e > x0]
    return interpolate_pieces(volume_at, bps, n)


def interpolate_pieces(f: Callable, bps, degree: int) -> PiecewisePolynomial:
    """Recover a piecewise polynomial from exact samples given its breakpoints."""
    pieces = []
    for i, a in enumerate(bps):
        if i + 1 < len(bps):
            b = bps[i + 1]
            xs = [a + (b - a) * Fraction(j, degree + 3) for j in range(1, degree + 3)]
        else:
            xs = [a + Fraction(j, 2) for j in range(1, degree + 3)]
        ys = [f(x) for x in xs]
        poly = interpolate(xs[:-1], ys[:-1])
        if poly_eval(poly, xs[-1]) != ys[-1]:
            raise ArithmeticError(f"volume is not polynomial of degree <= {degree} on piece {i}")
        pieces.append(poly)
    # merge adjacent identical pieces
    out_b = [bps[0]]
    out_p = [pieces[0]]
    for b, p in zip(bps[1:], pieces[1:]):
        if p == out_p[-1]:
            continue
        out_b.append(b)
        out_p.append(p)
    return PiecewisePolynomial(tuple(out_b), tuple(out_p))
