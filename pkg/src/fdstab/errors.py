"""Exception hierarchy.

Errors that signal a violated mathematical hypothesis (unstable roots, a
vanishing characteristic symbol, ...) derive from :class:`HypothesisViolation`
so that front ends can map them to a dedicated exit status.
"""


class FdStabError(Exception):
    """Base class for all package errors."""


class ConfigError(FdStabError, ValueError):
    """Malformed scheme file or out-of-range parameter."""


class HypothesisViolation(FdStabError, ValueError):
    """A numerical hypothesis required by a construction does not hold."""


class ZeroPolynomial(FdStabError, ValueError):
    pass


class ClusterAmbiguity(FdStabError):
    """Single-linkage clustering produced an overly long chain of roots."""


class UnstableRoot(HypothesisViolation):
    pass


class BoundaryMultipleRoot(HypothesisViolation):
    pass


class BadEpsilon(HypothesisViolation):
    pass


class LengthMismatch(FdStabError, ValueError):
    pass


class CharacteristicSymbol(HypothesisViolation):
    """The symbol of the top time level vanishes at some frequency."""


class DegenerateEdgeSymbol(HypothesisViolation):
    """An extreme boundary symbol has degree zero in z."""


class EdgeSymbolVanishes(HypothesisViolation):
    pass


class WrongTimeLevels(FdStabError, ValueError):
    pass


class SingularStep(HypothesisViolation):
    pass


class TruncationBreach(FdStabError):
    """Nonzero values reached the artificial far end of a truncated grid."""


class EmptyRun(FdStabError, ValueError):
    pass
