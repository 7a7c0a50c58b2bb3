"""Exception hierarchy shared by every module of the package."""


class FsaiError(Exception):
    """Base class for all errors raised by fsaism."""

    code = "FsaiError"


class IndexOutOfRange(FsaiError, IndexError):
    code = "IndexOutOfRange"


class DimensionMismatch(FsaiError, ValueError):
    code = "DimensionMismatch"


class SingularLocalSystem(FsaiError, ArithmeticError):
    """A gathered local system had a (numerically) zero pivot."""

    code = "SingularLocalSystem"


class NotSingularIrreducible(FsaiError, ValueError):
    code = "NotSingularIrreducible"


class InvalidExclusion(FsaiError, ValueError):
    code = "InvalidExclusion"


class InvalidPattern(FsaiError, ValueError):
    code = "InvalidPattern"


class NonpositiveDiagonal(FsaiError, ArithmeticError):
    code = "NonpositiveDiagonal"


class ArrowheadViolation(FsaiError, ArithmeticError):
    code = "ArrowheadViolation"


class NotConverged(FsaiError, RuntimeError):
    """Raised with the offending :class:`SolveReport` attached as ``report``."""

    code = "NotConverged"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InvalidParam(FsaiError, ValueError):
    code = "InvalidParam"


class DisconnectedGraph(FsaiError, ValueError):
    code = "DisconnectedGraph"


class ParseError(FsaiError, ValueError):
    code = "ParseError"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedFormat(FsaiError, ValueError):
    code = "UnsupportedFormat"
