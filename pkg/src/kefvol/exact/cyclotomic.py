"""Exact arithmetic in cyclotomic fields Q(zeta_N).

A :class:`CycNum` stores coordinates in the power basis 1, z, ..., z^(phi(N)-1)
of Q(zeta_N), reduced modulo the N-th cyclotomic polynomial.  Mixed-conductor
operations lift both sides to the lcm of the conductors first, so equality is
always decidable.  Hashing uses the normalized trace Tr(a)/phi(N), which does
not change under lifting, so equal numbers hash equally whatever their
conductor (and a rational CycNum hashes like the Fraction it equals).
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache


# ---------------------------------------------------------------- integer polynomials


def _poly_divmod_int(num, den):
    """Exact division of integer polynomials (low degree first), den monic."""
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    return q, num[: len(den) - 1]


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    p = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            p, rem = _poly_divmod_int(p, cyclotomic_poly(d))
            assert not any(rem)
    return tuple(p)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


@lru_cache(maxsize=None)
def _power_table(n: int, upto: int) -> tuple:
    """x^k mod Phi_n for k < upto, each as a tuple of ints of length phi(n)."""
    phi_poly = cyclotomic_poly(n)
    deg = len(phi_poly) - 1
    rows = []
    cur = [1] + [0] * (deg - 1)
    for _ in range(upto):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        for j in range(deg):
            cur[j] -= top * phi_poly[j]
    return tuple(rows)


def _reduce(n: int, coeffs) -> tuple:
    deg = euler_phi(n)
    if n == 1:
        return (sum((Fraction(c) for c in coeffs), Fraction(0)),)
    table = _power_table(n, max(len(coeffs), deg))
    out = [Fraction(0)] * deg
    for k, c in enumerate(coeffs):
        if c:
            row = table[k]
            for j in range(deg):
                if row[j]:
                    out[j] += c * row[j]
    return tuple(out)


@lru_cache(maxsize=None)
def _trace_row(n: int) -> tuple:
    """Tr(z^k) for the power basis of Q(zeta_n), via Ramanujan sums."""
    deg = euler_phi(n)
    out = []
    for k in range(deg):
        g = math.gcd(n, k)
        m = n // g
        out.append(_mobius(m) * deg // euler_phi(m))
    return tuple(out)


def _mobius(m: int) -> int:
    res = 1
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    if m > 1:
        res = -res
    return res


# ---------------------------------------------------------------- the number type


class CycNum:
    """An element of Q(zeta_N) in reduced power-basis coordinates."""

    __slots__ = ("conductor", "coeffs", "_hash")

    def __init__(self, conductor: int, coeffs):
        n = int(conductor)
        if n <= 0:
            raise ValueError("conductor must be positive")
        self.conductor = n
        self.coeffs = _reduce(n, [Fraction(c) for c in coeffs])
        self._hash = None

    # constructors
    @classmethod
    def rational(cls, x, conductor: int = 1) -> "CycNum":
        return cls(conductor, [Fraction(x)])

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CycNum":
        k %= n
        return cls(n, [0] * k + [1])

    # conversions
    def lift(self, m: int) -> "CycNum":
        """Same number viewed in Q(zeta_m); m must be a multiple of the conductor."""
        if m == self.conductor:
            return self
        if m % self.conductor:
            raise ValueError("can only lift to a multiple of the conductor")
        s = m // self.conductor
        big = [Fraction(0)] * (s * (len(self.coeffs) - 1) + 1)
        for k, c in enumerate(self.coeffs):
            big[k * s] = c
        return CycNum(m, big)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.conductor)
        return sum((float(c) * z ** k for k, c in enumerate(self.coeffs)), 0j)

    def trace(self) -> Fraction:
        return sum((c * t for c, t in zip(self.coeffs, _trace_row(self.conductor))), Fraction(0))

    def galois(self, k: int) -> "CycNum":
        """Image under zeta -> zeta^k (k coprime to the conductor)."""
        n = self.conductor
        if math.gcd(k, n) != 1:
            raise ValueError("Galois exponent must be a unit")
        k %= n
        big = [Fraction(0)] * (k * max(len(self.coeffs) - 1, 0) + 1)
        for j, c in enumerate(self.coeffs):
            big[j * k] += c
        return CycNum(n, big)

    def conjugate(self) -> "CycNum":
        if self.conductor == 1:
            return self
        return self.galois(self.conductor - 1)

    def norm(self) -> Fraction:
        n = self.conductor
        out = CycNum(n, [1])
        for k in range(1, n + 1):
            if math.gcd(k, n) == 1:
                out = out * self.galois(k)
        return out.to_rational()

    # arithmetic
    @staticmethod
    def _coerce(other):
        if isinstance(other, CycNum):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return CycNum(1, [other])
        return None

    def _common(self, other):
        if self.conductor == other.conductor:
            return self, other
        m = self.conductor * other.conductor // math.gcd(self.conductor, other.conductor)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._common(o)
        return CycNum(a.conductor, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.conductor, [-x for x in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.conductor == 1:
            c = o.coeffs[0]
            return CycNum(self.conductor, [c * x for x in self.coeffs])
        if self.conductor == 1:
            c = self.coeffs[0]
            return CycNum(o.conductor, [c * x for x in o.coeffs])
        a, b = self._common(o)
        prod = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return CycNum(a.conductor, prod)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        n = self.conductor
        if all(c == 0 for c in self.coeffs):
            raise ZeroDivisionError("inverse of zero")
        others = CycNum(n, [1])
        for k in range(2, n + 1):
            if math.gcd(k, n) == 1 and k % n != 1:
                others = others * self.galois(k)
        nrm = (self * others).to_rational()
        return others * (1 / nrm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.conductor == 1:
            return self * (1 / o.coeffs[0])
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = CycNum(self.conductor, [1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._common(o)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.trace() / euler_phi(self.conductor))
        return self._hash

    def __repr__(self):
        if self.is_rational():
            c = self.coeffs[0]
            return f"CycNum({c})"
        return f"CycNum({self.conductor}, {[str(c) for c in self.coeffs]})"


def zeta(n: int, k: int = 1) -> CycNum:
    return CycNum.zeta(n, k)


def cyc(x) -> CycNum:
    if isinstance(x, CycNum):
        return x
    return CycNum.rational(x)


# ---------------------------------------------------------------- polynomials in t


def _poly_trim(p):
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return p


def poly_mul(p, q):
    if not p or not q:
        return []
    out = [CycNum(1, [0])] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            if not b.is_zero():
                out[i + j] = out[i + j] + a * b
    return _poly_trim(out)


def poly_sub(p, q):
    n = max(len(p), len(q))
    z = CycNum(1, [0])
    return _poly_trim([(p[i] if i < len(p) else z) - (q[i] if i < len(q) else z) for i in range(n)])


def poly_exact_div(p, q):
    """Quotient of polynomials over a field; asserts the division is exact."""
    p = _poly_trim(p)
    q = _poly_trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    if not p:
        return []
    lead_inv = q[-1].inverse()
    rem = list(p)
    quo = [CycNum(1, [0])] * (len(p) - len(q) + 1)
    for i in range(len(p) - len(q), -1, -1):
        c = rem[i + len(q) - 1] * lead_inv
        quo[i] = c
        if not c.is_zero():
            for j, b in enumerate(q):
                rem[i + j] = rem[i + j] - c * b
    if any(not r.is_zero() for r in rem):
        raise ArithmeticError("inexact polynomial division")
    return _poly_trim(quo)


def cyc_char_poly_factor(g) -> list:
    """det(I - t·g) as a list of CycNum coefficients (constant term first).

    Bareiss fraction-free elimination over CycNum[t]; every division is an
    exact polynomial division.
    """
    n = len(g)
    one = CycNum(1, [1])
    zero = CycNum(1, [0])
    m = []
    for i in range(n):
        row = []
        for j in range(n):
            e = cyc(g[i][j])
            row.append(_poly_trim([one if i == j else zero, -e]))
        m.append(row)
    if n == 0:
        return [one]
    sign = 1
    prev = [one]
    for k in range(n - 1):
        if not m[k][k]:
            p = next((i for i in range(k + 1, n) if m[i][k]), None)
            if p is None:
                return []
            m[k], m[p] = m[p], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = poly_sub(poly_mul(m[i][j], m[k][k]), poly_mul(m[i][k], m[k][j]))
                m[i][j] = poly_exact_div(num, prev)
        prev = m[k][k]
    out = m[n - 1][n - 1]
    if sign < 0:
        out = [-c for c in out]
    return out
