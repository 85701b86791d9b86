"""Exception hierarchy shared by all modules."""


class GaborNCTError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(GaborNCTError, ValueError):
    """Signal or matrix sizes do not agree."""


class LatticeError(GaborNCTError, ValueError):
    """Lattice parameters are invalid (non-divisor steps, bad length)."""


class ParameterError(GaborNCTError, ValueError):
    """A scalar parameter is outside its admissible range."""


class NumericalError(GaborNCTError, ArithmeticError):
    """A numerical routine failed or produced an untrustworthy result."""


class NotAFrameError(NumericalError):
    """The frame operator is singular (lower frame bound below tolerance)."""


class NotInvertibleError(NumericalError):
    """An algebra element has no inverse in the finite representation."""

    def __init__(self, message, min_singular_value=None):
        super().__init__(message)
        self.min_singular_value = min_singular_value


class ContourError(NumericalError):
    """The integration contour does not separate the spectrum correctly."""


class ConditioningError(NumericalError):
    """A resolvent solve failed near the spectrum."""


class IncompatibleAlgebraError(GaborNCTError, ValueError):
    """Two twisted sequences carry different deformation parameters."""


class RepresentationUnavailableError(GaborNCTError, ValueError):
    """The deformation parameter has no matrix model on the given lattice."""


class SupportOverflowError(GaborNCTError, MemoryError):
    """A product would exceed the configured support radius."""
