"""Exception hierarchy shared by every padicalc module."""


class PadicError(Exception):
    """Base class for all errors raised by this package."""


class DivisionByZero(PadicError, ZeroDivisionError):
    """Division by a value that is zero or indistinguishable from zero."""


class PrecisionExhausted(PadicError):
    """Not enough known digits to carry out the requested operation."""


class IndistinguishableAtPrecision(PrecisionExhausted):
    """Two operands agree on every known digit and cannot be separated."""


class InsufficientPrecision(PrecisionExhausted):
    """An operand does not carry the digits an operation needs."""


class PrecisionInsufficientForImage(PrecisionExhausted):
    """Forward images are not determined at the requested output scale."""


class GuardUndecidableAtPrecision(PrecisionExhausted):
    """A piecewise guard cannot be decided from the known digits."""


class BudgetExceeded(PadicError):
    """An enumeration would exceed the configured budget."""


class OutOfDomain(PadicError):
    """A function was evaluated outside its domain."""


class HenselConditionFailed(PadicError):
    """The strong Hensel precondition could not be verified."""


class UnsupportedExpression(PadicError):
    """The requested operation is not defined for this expression node."""


class NotAContraction(PadicError):
    """The fixed-point iteration left its ball or stopped contracting."""


class MaxIterExceeded(PadicError):
    """The iteration did not reach tolerance within the allowed steps."""


class ZeroDerivative(PadicError):
    """A nonzero derivative is required and was not available."""


class NotInjectiveAtScale(PadicError):
    """Two enumerated points map to the same output residue."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class DecompositionIncomplete(PadicError):
    """Part of the domain could not be covered by certified balls."""

    def __init__(self, message: str, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class ParseError(PadicError, ValueError):
    """Malformed textual input."""
