"""Exception types shared across the package."""


class ConcentrixError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(ConcentrixError):
    """Input matrix or parameter fails a structural precondition."""


class NumericalFailure(ConcentrixError):
    """A numerical routine failed to converge."""


class ZeroMatrix(InvalidInput):
    """Operation undefined for the zero matrix."""


class NotPsd(InvalidInput):
    """Matrix is not positive semidefinite within tolerance."""


class NotPd(InvalidInput):
    """Matrix is not positive definite within tolerance."""


class DimMismatch(InvalidInput):
    """Operands have incompatible dimensions."""


class ShapeMismatch(InvalidInput):
    """Collection members do not share a common shape."""


class TooFewSamples(InvalidInput):
    """Estimator needs more samples than were supplied."""


class UnsupportedModel(InvalidInput):
    """Sampler model kind has no closed-form treatment."""


class ParameterRange(InvalidInput):
    """Scalar parameter outside its admissible range."""


class ConstraintViolated(InvalidInput):
    """Input violates a semidefinite constraint."""


class Overflow(ConcentrixError):
    """Evaluation would overflow double precision."""


class DomainViolation(ConcentrixError):
    """An eigenvalue lies outside the declared function domain."""


class UsageError(ConcentrixError):
    """Command line was malformed."""
