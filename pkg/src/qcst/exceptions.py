"""Exception hierarchy.

Every error raised deliberately by the package derives from ``QCSTError`` so
callers (the CLI in particular) can separate input problems from bugs.
"""


class QCSTError(Exception):
    """Base class for all package errors."""


class InputError(QCSTError):
    """Bad user input: metric files, parameters, points, ranges."""


# jets

class DivisionByZeroJet(QCSTError, ArithmeticError):
    pass


class DomainErrorJet(QCSTError, ArithmeticError):
    pass


# expressions

class ExprError(InputError):
    """Expression error carrying a byte offset into the source.

    ``line`` and ``col`` are 1-based; they default to line 1 and are
    re-based by the metric loader when the expression sits inside a file.
    """

    def __init__(self, message, offset=0, line=1, col=None):
        self.message = message
        self.offset = offset
        self.line = line
        self.col = offset + 1 if col is None else col
        super().__init__(f"{message} (line {self.line}, col {self.col})")

    def rebase(self, line, col_offset):
        return type(self)(self.message, self.offset, line, col_offset + self.offset + 1)


class UnexpectedCharacter(ExprError):
    pass


class UnexpectedToken(ExprError):
    """``expected`` lists what the parser would have accepted at ``offset``."""

    def __init__(self, message, offset=0, line=1, col=None, expected=()):
        super().__init__(message, offset, line, col)
        self.expected = tuple(expected)

    def rebase(self, line, col_offset):
        return type(self)(self.message, self.offset, line, col_offset + self.offset + 1, self.expected)


class UnbalancedParenthesis(ExprError):
    pass


class UnknownFunction(ExprError):
    pass


class BadExponent(ExprError):
    pass


class UnboundName(ExprError):
    pass


# metric

class ParseError(InputError):
    def __init__(self, message, line=0, col=0):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}")


class MissingComponent(InputError):
    pass


class DuplicateKey(InputError):
    pass


class UnknownCoordinate(InputError):
    pass


class UnknownBuiltin(InputError):
    pass


class BadParameter(InputError):
    pass


class SingularMetric(InputError):
    pass


class SignatureError(InputError):
    pass


# qc / fluid / frg / diagnostics

class NonDiagonalizableRicci(QCSTError):
    pass


class NonPositiveKappa(InputError):
    pass


class DomainError(InputError):
    pass


class BadTermCount(InputError):
    pass


class EmptyGrid(InputError):
    pass


class NotUnitTimelike(InputError):
    pass


class MissingGeneratorField(InputError):
    pass

