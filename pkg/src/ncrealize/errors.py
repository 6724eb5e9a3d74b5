"""Exception hierarchy shared by all ncrealize modules."""


class NCRealizeError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 2


class AlphabetError(NCRealizeError, ValueError):
    """Words or series over incompatible alphabets."""


class InputError(NCRealizeError, ValueError):
    """Malformed or out-of-range input."""


class NotInvertibleError(NCRealizeError, ArithmeticError):
    """Inversion requested where the value at the centre vanishes."""

    exit_code = 3


class DomainError(NCRealizeError, ArithmeticError):
    """A linear pencil is singular at the requested point.

    Attributes
    ----------
    rcond : float
        Reciprocal condition estimate of the pencil (``nan`` if unknown).
    """

    exit_code = 3

    def __init__(self, message, rcond=float("nan")):
        super().__init__(message)
        self.rcond = rcond


class StructuralError(NCRealizeError, ValueError):
    """Shapes, variable counts or state dimensions do not match."""


class PreconditionError(NCRealizeError, ValueError):
    """A documented precondition of an operation does not hold."""


class NumericalError(NCRealizeError, RuntimeError):
    """A numerical kernel failed (eigensolver, factorisation)."""

    exit_code = 3


class ParseError(NCRealizeError, ValueError):
    """Syntax error in an NC rational expression.

    Attributes
    ----------
    position : int
        Zero-based character offset of the offending token.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position
