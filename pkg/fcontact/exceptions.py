class FContactError(Exception):
    """
    Base class of every error raised by python-fcontact
    """


class ChartError(FContactError):
    pass


class DimensionError(FContactError):
    pass


class DomainError(FContactError):
    """
    A component function is singular at the evaluation point
    """


class ParseError(FContactError):
    """
    Syntax error in an expression; carries the byte offset
    and the 1-based line/column of the offending token
    """
    def __init__(self, message, text, offset):
        self.message = message
        self.text = text
        self.offset = offset
        prefix = text.encode('utf-8')[:offset].decode('utf-8', errors='ignore')
        self.line = prefix.count('\n') + 1
        self.column = len(prefix) - (prefix.rfind('\n') + 1) + 1
        super().__init__(f"line {self.line}, column {self.column}: {message} "
                         f"(offset {offset}) in {text!r}")


class UnknownIdentifierError(ParseError):
    pass


class PreconditionError(FContactError):
    def __init__(self, message, residuals=None):
        self.residuals = dict(residuals or {})
        super().__init__(message)


class InvalidMatrixError(PreconditionError):
    pass


class ConvergenceError(FContactError):
    def __init__(self, message, best_residual, best=None):
        self.best_residual = best_residual
        self.best = best
        super().__init__(message)


class ConfigError(FContactError):
    pass


class CatalogError(FContactError):
    pass
