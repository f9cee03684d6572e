"""Exception hierarchy shared by every tmod module."""


class TmodError(Exception):
    """Base class for all library errors."""


class ValidationError(TmodError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class EigenvalueConditionFailed(ValidationError):
    pass


class FieldMismatch(TmodError):
    pass


class PrecisionExhausted(TmodError):
    pass


class NonConvergent(TmodError):
    pass


class NonInvertibleConstantTerm(TmodError):
    pass


class NotNormalized(TmodError):
    pass


class TailBoundFailure(TmodError):
    pass


class NotAbelian(TmodError):
    pass


class PresentationBoundFailure(TmodError):
    pass


class DimensionUnsupported(TmodError):
    pass


class LeadingCoefficientZero(TmodError):
    pass
