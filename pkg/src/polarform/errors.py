"""Exception hierarchy shared by all modules."""


class PolarformError(Exception):
    """Base class for every error raised by the package."""


class PresetValidationError(PolarformError, ValueError):
    pass


class DomainError(PolarformError, ValueError):
    pass


class SingularSystemError(PolarformError, ArithmeticError):
    pass


class MismatchedSystemError(PolarformError, ValueError):
    pass


class UnsupportedOperationError(PolarformError):
    pass


class IllConditionedError(PolarformError, ArithmeticError):
    pass


class DuplicateNodeError(PolarformError, ValueError):
    pass


class InsufficientDerivativeError(PolarformError, ValueError):
    pass


class DegreeError(PolarformError, ValueError):
    pass


class OrderError(PolarformError, ValueError):
    pass


class ResourceError(PolarformError):
    pass


class NumericError(PolarformError, ArithmeticError):
    """Quadrature or other numerical procedure failed to reach its tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
