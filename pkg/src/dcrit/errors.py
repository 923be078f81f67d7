"""Exception hierarchy.

The CLI maps :class:`ParseError` to exit code 2, :class:`PreconditionError`
to exit code 3 and :class:`ViolationError` to exit code 1.
"""


class DcritError(Exception):
    pass


class ParseError(DcritError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)


class ExprSyntaxError(ParseError):
    pass


class UnknownVariable(ParseError):
    pass


class MissingKey(ParseError):
    pass


class DuplicateChart(ParseError):
    pass


class PreconditionError(DcritError, ValueError):
    pass


class NotZeroDimensional(PreconditionError):
    pass


class NonUnit(PreconditionError):
    pass


class NotASquare(PreconditionError):
    pass


class OriginNotCritical(PreconditionError):
    pass


class PointNotCritical(PreconditionError):
    pass


class ZeroScalar(PreconditionError):
    pass


class NotClosed(PreconditionError):
    pass


class NotEquivariant(PreconditionError):
    pass


class NotInSquare(PreconditionError):
    pass


class BadFrame(PreconditionError):
    pass


class DegenerateForm(PreconditionError):
    pass


class MismatchedOverlap(PreconditionError):
    pass


class NonMonomialTransition(PreconditionError):
    pass


class ViolationError(DcritError):
    pass


class LawViolation(ViolationError):
    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class CocycleViolation(ViolationError):
    def __init__(self, message: str, triple=None):
        self.triple = triple
        super().__init__(message)
