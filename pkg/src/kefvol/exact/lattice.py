"""Full-rank lattices in Q^n expressed against the reference lattice Z^n."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from ..errors import InvalidWeights
from .linalg import det, inverse, rational_lattice_basis, smith_diagonal, transpose
from .rational import is_integral, lcm_denominators


@dataclass(frozen=True)
class Lattice:
    """A lattice N in Q^n given by a basis (tuple of column vectors).

    ``index`` is |det basis|, the covolume of N relative to Z^n.  The dual
    lattice M = Hom(N, Z) lives in the same reference coordinates: m is in M
    iff B^T m is integral.
    """

    ambient_dim: int
    basis: tuple  # tuple of n column vectors

    def __post_init__(self):
        b = tuple(tuple(Fraction(x) for x in v) for v in self.basis)
        if len(b) != self.ambient_dim or any(len(v) != self.ambient_dim for v in b):
            raise ValueError("basis must be square")
        if det(b) == 0:
            raise ValueError("lattice basis is singular")
        object.__setattr__(self, "basis", b)

    @classmethod
    def standard(cls, n: int) -> "Lattice":
        return cls(n, tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def spanned_by(cls, gens, n: int) -> "Lattice":
        """Lattice generated by rational vectors spanning Q^n."""
        return cls(n, tuple(rational_lattice_basis(gens, n)))

    @property
    def index(self) -> Fraction:
        return abs(det(self.basis))

    @cached_property
    def _coord_matrix(self):
        # rows: coordinates map v -> B^{-1} v, with B = columns
        return inverse(transpose(self.basis))

    def coordinates(self, v) -> tuple:
        return tuple(sum((a * Fraction(x) for a, x in zip(row, v)), Fraction(0))
                     for row in self._coord_matrix)

    def contains(self, v) -> bool:
        return is_integral(self.coordinates(v))

    def dual_contains(self, m) -> bool:
        return all(sum((Fraction(a) * Fraction(b) for a, b in zip(col, m)), Fraction(0)).denominator == 1
                   for col in self.basis)

    @cached_property
    def dual_basis(self) -> tuple:
        """Basis of M = {m : <m, N> in Z}: the columns of B^{-T}."""
        return tuple(tuple(col) for col in transpose(inverse([list(v) for v in self.basis])))

    @property
    def dual_covolume(self) -> Fraction:
        return 1 / self.index

    def primitive(self, v) -> tuple:
        """Primitive vector of N on the ray through ``v``."""
        c = self.coordinates(v)
        den = lcm_denominators(c)
        ints = [int(x * den) for x in c]
        g = 0
        for z in ints:
            g = math.gcd(g, z)
        if g == 0:
            raise ValueError("zero vector")
        scale = Fraction(den, g)
        return tuple(scale * Fraction(x) for x in v)

    def dual_primitive(self, m) -> tuple:
        """Primitive vector of M on the ray through ``m``."""
        vals = [sum((Fraction(a) * Fraction(b) for a, b in zip(col, m)), Fraction(0)) for col in self.basis]
        den = lcm_denominators(vals)
        ints = [int(x * den) for x in vals]
        g = 0
        for z in ints:
            g = math.gcd(g, z)
        if g == 0:
            raise ValueError("zero vector")
        scale = Fraction(den, g)
        return tuple(scale * Fraction(x) for x in m)

    def quotient_invariants(self) -> list[int]:
        """Nontrivial invariant factors of N / Z^n (requires Z^n ⊆ N)."""
        binv = self._coord_matrix
        if not all(is_integral(r) for r in binv):
            raise ValueError("Z^n is not contained in this lattice")
        return [d for d in smith_diagonal([[int(x) for x in r] for r in binv]) if d != 1]


def lattice_from_quotient(r: int, weights) -> Lattice:
    """The lattice N = Z^n + Z·(a/r) of the cyclic quotient 1/r(a_1, ..., a_n)."""
    r = int(r)
    a = [int(x) for x in weights]
    if r <= 0:
        raise InvalidWeights("order must be positive")
    g = r
    for x in a:
        g = math.gcd(g, x)
    if g != 1:
        raise InvalidWeights(f"gcd(r, a) = {g} != 1")
    n = len(a)
    gens = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    gens.append(tuple(Fraction(x % r, r) for x in a))
    return Lattice.spanned_by(gens, n)
