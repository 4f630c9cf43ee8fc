"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`KefvolError`
so callers (and the CLI) can separate computation failures from bugs.
"""

from __future__ import annotations


class KefvolError(Exception):
    """Base class for all library errors."""


# exact core
class Infeasible(KefvolError):
    pass


class Unbounded(KefvolError):
    pass


class UnboundedPolytope(KefvolError):
    pass


class InvalidWeights(KefvolError):
    pass


class BudgetExceeded(KefvolError):
    pass


# monomial / valuation
class NonQGorenstein(KefvolError):
    pass


class TrivialIdeal(KefvolError):
    pass


class InfiniteColength(KefvolError):
    pass


class AmbientMismatch(KefvolError):
    pass


class NonpositiveCutoff(KefvolError):
    pass


class NonKlt(KefvolError):
    pass


class NoConvergence(KefvolError):
    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


# molien
class ClosureCapExceeded(KefvolError):
    pass


class SingularGenerator(KefvolError):
    pass


class UnknownType(KefvolError):
    pass


class NonRationalSeries(KefvolError):
    pass


class DegreeTooSmall(KefvolError):
    pass


# fano / verify
class InvalidModel(KefvolError):
    pass


class PointMismatch(KefvolError):
    pass


class MissingGroup(KefvolError):
    pass


class TerminalPoint(KefvolError):
    pass


class EmptyCorpus(KefvolError):
    pass


class DegreeOutOfRange(KefvolError):
    pass


class NotFlaggedSemistable(UserWarning):
    """Warning: a volume bound was evaluated on a model not flagged K-semistable."""


class BarycenterWarning(UserWarning):
    """Warning: the kss flag of a toric model disagrees with its barycenter."""


# cli
class SchemaError(KefvolError):
    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class UnresolvedReference(KefvolError):
    pass
