"""Exact arithmetic and geometry kernel."""

from .cyclotomic import CycNum, cyc, cyc_char_poly_factor, zeta
from .lattice import Lattice, lattice_from_quotient
from .lp import lp_minimize
from .polytope import PolytopeQ, hull_facets, polytope_volume
from .rational import QVec, Rat, fmt, qvec, rat

__all__ = [
    "CycNum",
    "Lattice",
    "PolytopeQ",
    "QVec",
    "Rat",
    "cyc",
    "cyc_char_poly_factor",
    "fmt",
    "hull_facets",
    "lattice_from_quotient",
    "lp_minimize",
    "polytope_volume",
    "qvec",
    "rat",
    "zeta",
]
