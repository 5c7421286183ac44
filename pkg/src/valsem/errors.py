"""Exception hierarchy shared by all valsem modules."""


class ValsemError(Exception):
    """Base class for every error raised by valsem."""


class ValidationError(ValsemError, ValueError):
    """Input violates a documented invariant."""


class IllegalSatellite(ValidationError):
    pass


class DanglingParent(ValidationError):
    pass


class VertexOutOfRange(ValidationError, IndexError):
    pass


class NonUnimodular(ValsemError, RuntimeError):
    """det(M) is not +-1. Only reachable through an internal bug."""


class NonTreeConfiguration(ValsemError, RuntimeError):
    pass


class BoxTooLarge(ValsemError):
    pass


class NotInSemigroup(ValsemError, ValueError):
    pass


class InternalNoSolution(ValsemError, RuntimeError):
    """A monomial whose existence is guaranteed was not found."""


class NoComponent(ValidationError):
    pass


class NotSingleMinimal(ValidationError):
    pass


class NotMinimal(ValidationError):
    pass


class NoStabilization(ValsemError):
    pass


class ZeroVectorFactor(ValidationError):
    pass


class ArityMismatch(ValidationError):
    pass


class Unstable(ValsemError):
    """A truncated specialization changed when the source box was enlarged."""


class MarginExceeded(ValsemError, ValueError):
    pass


class NotMinimalWarning(UserWarning):
    """The model is not the minimal resolution of the marked divisors."""


class OutsideFigureClass(UserWarning):
    """Single-vertex model; formulas are evaluated but lie outside the usual s >= 2 setting."""
