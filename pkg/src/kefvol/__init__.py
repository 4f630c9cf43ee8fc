"""Exact local invariants behind volume bounds for singular Fano varieties.

Log canonical thresholds, multiplicities and normalized volumes of monomial
data on toric singularities, Molien series of finite matrix groups, and
volume functions of toric Fano models, all in exact rational arithmetic.
"""

__version__ = "0.1.0"
