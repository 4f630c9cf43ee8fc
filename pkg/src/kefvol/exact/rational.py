"""Exact scalars and vectors.

``Rat`` is :class:`fractions.Fraction` (always reduced, positive denominator).
A ``QVec`` is a plain tuple of ``Fraction``; helpers below do the little
vector algebra the rest of the package needs.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction
QVec = tuple  # tuple[Fraction, ...]

_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def rat(x) -> Fraction:
    """Coerce ``x`` to an exact rational.

    Accepts ints, Fractions and strings of the form ``"p"`` or ``"p/q"``.
    Floats and decimal strings are rejected: nothing in this package is
    allowed to pick up binary rounding silently.
    """
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        m = _RAT_RE.match(x)
        if not m:
            raise ValueError(f"not an exact rational literal: {x!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ZeroDivisionError(f"zero denominator in {x!r}")
        return Fraction(num, den)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def qvec(xs: Iterable) -> tuple:
    return tuple(rat(x) for x in xs)


def fmt(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a):
    return tuple(c * x for x in a)


def lcm_denominators(xs: Iterable[Fraction]) -> int:
    out = 1
    for x in xs:
        d = Fraction(x).denominator
        out = out * d // math.gcd(out, d)
    return out


def primitive_integer(v: Sequence) -> tuple[int, ...]:
    """Smallest integer vector on the ray through the nonzero vector ``v``."""
    v = [Fraction(x) for x in v]
    den = lcm_denominators(v)
    ints = [int(x * den) for x in v]
    g = 0
    for z in ints:
        g = math.gcd(g, z)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(z // g for z in ints)


def is_integral(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)
