"""Exception hierarchy shared across the toolkit."""


class PceError(Exception):
    """Base class for all toolkit errors."""


class NonFinite(PceError):
    """Input contains NaN or Inf entries."""


class ZeroMatrix(PceError):
    """Input matrix is numerically zero."""


class DimensionMismatch(PceError):
    """Operand shapes are incompatible."""


class NotConverged(PceError):
    """An iterative or LAPACK eigensolve failed to converge."""


class EmptySpectrum(PceError):
    """A singular-value array of length zero was supplied."""


class NotSorted(PceError):
    """A singular-value array increases somewhere beyond tolerance."""


class DegenerateDimension(PceError):
    """The estimated dimension is zero; lambda is too small for the spectrum."""

    def __init__(self, message, min_lambda=None):
        super().__init__(message)
        self.min_lambda = min_lambda


class BadK(PceError):
    """Requested truncation rank is out of range."""


class BadDim(PceError):
    """Requested embedding dimension exceeds what the pencil supports."""


class TooLarge(PceError):
    """Materializing this object would exceed the configured size cap."""


class DegenerateNeighborhood(PceError):
    """A local Gram system is singular even after regularization."""


class InfeasibleSpec(PceError):
    """A synthetic-data specification cannot be realized."""


class TooFewSamples(PceError):
    """A class has too few samples for the requested split."""


class EmptyTrainingSet(PceError):
    """Classification requested with no training columns."""


class LengthMismatch(PceError):
    """Paired sequences have different lengths."""


class ParseError(PceError):
    """A text file failed to parse; carries line (1-based) when known."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ShapeError(PceError):
    """File body disagrees with its declared shape (e.g. a ragged row)."""
