"""Exception types shared across the package."""


class WlcheckError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(WlcheckError):
    """A value left the domain where an expression or law is defined."""

    def __init__(self, message, subexpr=None):
        super().__init__(message)
        self.subexpr = subexpr

    def __str__(self):
        base = super().__str__()
        if self.subexpr:
            return f"{base} (in '{self.subexpr}')"
        return base


class ExprError(WlcheckError):
    """Base class for expression-language errors; carries a 1-based column."""

    def __init__(self, message, col=None):
        super().__init__(message)
        self.col = col

    def __str__(self):
        base = super().__str__()
        if self.col is not None:
            return f"{base} (column {self.col})"
        return base


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


class ArityError(ExprError):
    pass


class ParticleOutOfRangeError(ExprError):
    pass


class ExhaustedSamplerError(WlcheckError):
    """Rejection sampling fell below the acceptance-rate floor."""


class UnknownCatalogKeyError(WlcheckError):
    pass


class ClosureError(WlcheckError):
    """A requested basis does not close under the commutator table."""


class BetaRequiredError(WlcheckError):
    pass


class BetaZeroError(WlcheckError):
    pass


class MissingProfileError(WlcheckError):
    pass


class ArityMismatchError(WlcheckError):
    pass


class DomainExitError(WlcheckError):
    """Integration left the law's validity region."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class StepTooLargeError(WlcheckError):
    pass


class NonMonotoneTimeError(WlcheckError):
    pass


class InterpolationRangeError(WlcheckError):
    pass


class KinematicsMismatch(UserWarning):
    """Advisory: a boost generator was requested for a law tagged with the
    other kinematics.  The construction formula is universal, so this is a
    warning rather than an error."""
