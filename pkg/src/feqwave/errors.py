"""Exception types raised by feqwave.

Every error may carry a ``witness``: the sample point that exposed the
problem, so diagnostics can name where a check broke.
"""


class FeqError(Exception):
    """Base class for all library errors."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# function evaluation / inversion
class OutOfDomain(FeqError):
    pass


class OutOfRange(FeqError):
    pass


class NonMonotone(FeqError):
    pass


class ConvergenceError(FeqError):
    pass


class NoSignChange(FeqError):
    pass


# functional equation
class NotEven(FeqError):
    pass


class SlopeTooLarge(FeqError):
    pass


class NotInvolution(FeqError):
    pass


class DomainMismatch(FeqError):
    pass


class ZeroScale(FeqError):
    pass


class DegenerateFamily(FeqError):
    pass


class UnknownFamily(FeqError):
    pass


class EmptyGrid(FeqError):
    pass


# freezing problems and fixtures
class InadmissibleProblem(FeqError):
    def __init__(self, message, findings=(), witness=None):
        super().__init__(message, witness)
        self.findings = list(findings)


class UnknownFixture(FeqError):
    pass


class MissingClosedForm(FeqError):
    pass
