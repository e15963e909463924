"""Exception hierarchy shared by every qbc module."""


class QBCError(Exception):
    pass


class ValidationError(QBCError, ValueError):
    """Input violates a documented invariant."""


class CapacityError(QBCError):
    """Request exceeds a table, qubit or schedule bound."""


class BudgetError(CapacityError):
    """Exact enumeration would exceed the configured work budget."""


class CompositionError(QBCError):
    """Two circuits do not share the register layout needed to compose them."""


class UnsupportedGateError(QBCError):
    pass


class ParseError(QBCError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
