"""Exception hierarchy shared by every chronoscale module."""


class ChronoscaleError(Exception):
    """Base class for all library errors."""


class ValidationError(ChronoscaleError, ValueError):
    """Malformed input (bad points, parameters, files)."""


class NonMonotonePoints(ValidationError):
    pass


class EmptyScale(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class WindowTooSmall(ValidationError):
    pass


class InvalidFamilyParameters(ValidationError):
    pass


class NotMonic(ValidationError):
    pass


class ProblemFileError(ValidationError):
    pass


class RootFindingFailure(ChronoscaleError):
    pass


class DegeneracyError(ChronoscaleError):
    """Numerical degeneracy: a quantity required to be nonzero is (nearly) zero."""


class RegressivityViolation(DegeneracyError):
    def __init__(self, message, index=None, value=None):
        super().__init__(message)
        self.index = index
        self.value = value


class DegenerateCoefficient(DegeneracyError):
    def __init__(self, message, index=None, value=None):
        super().__init__(message)
        self.index = index
        self.value = value


class OverflowRisk(DegeneracyError):
    pass
