"""Exception types shared across the toolkit.

Every error carries a short machine-readable ``code`` so the CLI can emit
one-line parsable diagnostics.
"""


class IrrcombError(Exception):
    code = "ERROR"


class ParseError(IrrcombError):
    code = "PARSE_ERROR"

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = "line %d, column %d: %s" % (line, column, message)
        super().__init__(message)


class TieUnresolved(IrrcombError):
    """Interval refinement hit the precision cap without separating two
    symbolically distinct values.  Usually means the declared basis is not
    actually independent, or a decimal literal ran out of digits."""

    code = "TIE_UNRESOLVED"


class EmptySet(IrrcombError):
    code = "EMPTY_SET"


class WindowExceeded(IrrcombError):
    code = "WINDOW_EXCEEDED"


class NonzeroConstantTerm(IrrcombError):
    code = "NONZERO_CONSTANT_TERM"


class ValuationZero(IrrcombError):
    code = "VALUATION_ZERO"


class NotContracting(IrrcombError):
    code = "NOT_CONTRACTING"


class UnknownMarker(IrrcombError):
    code = "UNKNOWN_MARKER"


class UnknownName(IrrcombError):
    code = "UNKNOWN_NAME"


class BadParameter(IrrcombError):
    code = "BAD_PARAMETER"


class XTooSmall(IrrcombError):
    code = "X_TOO_SMALL"


class NoSignChange(IrrcombError):
    code = "NO_SIGN_CHANGE"


class TailBoundFailure(IrrcombError):
    code = "TAIL_BOUND_FAILURE"


class TailTooFat(IrrcombError):
    code = "TAIL_TOO_FAT"


class DegenerateSingularity(IrrcombError):
    code = "DEGENERATE_SINGULARITY"


class DegeneratePhase(IrrcombError):
    code = "DEGENERATE_PHASE"


class UnsupportedAlpha(IrrcombError):
    code = "UNSUPPORTED_ALPHA"


class NotPrimitiveError(IrrcombError):
    """Raised by CLI paths that require a primitive class."""

    code = "NOT_PRIMITIVE"


class UnknownPrimitivityError(IrrcombError):
    code = "UNKNOWN_PRIMITIVITY"
