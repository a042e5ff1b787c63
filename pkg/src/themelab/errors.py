"""Exception hierarchy shared by all themelab modules."""


class ThemeLabError(Exception):
    """Base class for every error raised by this package."""


class PrecisionError(ThemeLabError):
    """An operation needs more working precision than the operand carries."""


class PrecisionExceeded(PrecisionError):
    """A coefficient beyond the known truncation order was requested."""


class PrecisionExhausted(PrecisionError):
    """A multi-stage computation ran out of certified precision mid-way."""


class NotAUnit(ThemeLabError):
    """Inversion of a series whose constant term is zero."""


class NotDivisible(ThemeLabError):
    """Exact series division failed a valuation requirement."""


class NotSolvable(ThemeLabError):
    """The right-hand side is outside the image of the operator."""


class Obstruction(ThemeLabError):
    """A coefficient-wise ODE has a non-removable obstruction.

    Attributes carry the critical index and the offending coefficient; for
    the multi-stage searches, ``relations`` holds the chain of scalar
    relations that led to the dead end.
    """

    def __init__(self, index, coefficient, message=None, relations=None):
        self.index = index
        self.coefficient = coefficient
        self.relations = tuple(relations) if relations else ()
        super().__init__(
            message
            or f"obstruction at b^{index}: coefficient {coefficient} must vanish"
        )


class FactorizationFailed(ThemeLabError):
    """No first-order factor with the required rational exponent exists."""


class InvalidCanonicalPoint(ThemeLabError):
    """Coefficient data violates the canonical-family constraints."""


class NotThematic(ThemeLabError):
    """The element does not generate a theme of the requested rank."""


class WrongInvariants(ThemeLabError):
    """The element's invariants do not match the ones supplied."""


class NotNormalized(ThemeLabError):
    """A presentation does not satisfy the expected normalization."""


class Inconclusive(ThemeLabError):
    """The working precision cannot certify the requested statement.

    ``certificate`` holds the partial rank certificate when available.
    """

    def __init__(self, message, certificate=None):
        self.certificate = certificate
        super().__init__(message)


class ParseError(ThemeLabError):
    """Malformed literal, expression, or input document."""
