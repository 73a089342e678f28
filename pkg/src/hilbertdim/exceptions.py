"""Exception hierarchy shared by all modules."""


class HilbertDimError(Exception):
    """Base class for every error raised by this package."""


class CorrelationError(HilbertDimError, ValueError):
    pass


class NegativeEntry(CorrelationError):
    pass


class NotNormalized(CorrelationError):
    pass


class ShapeMismatch(CorrelationError):
    pass


class IndexOutOfRange(HilbertDimError, IndexError):
    pass


class ParseError(HilbertDimError, ValueError):
    """Input text is not a well-formed document of the expected schema."""


class BadDimension(HilbertDimError, ValueError):
    pass


class BadWeights(HilbertDimError, ValueError):
    pass


class InfeasiblePerturbation(HilbertDimError, ValueError):
    pass


class InvalidRepresentation(HilbertDimError, ValueError):
    pass


class NotHermitian(HilbertDimError, ValueError):
    pass


class DimMismatch(HilbertDimError, ValueError):
    pass


class ZeroMatrix(HilbertDimError, ValueError):
    pass
