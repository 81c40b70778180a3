"""Exception hierarchy.

Two families: ``ValidationError`` for bad inputs (shapes, non-unit data,
non-unimodular matrices) and ``NumericalError`` for inputs that are valid but
numerically degenerate (rank loss, undefined means). The CLI maps them to
exit codes 2 and 3.
"""


class PSSAError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PSSAError, ValueError):
    pass


class NumericalError(PSSAError, ArithmeticError):
    pass


class DimensionError(ValidationError):
    pass


class NonUnitData(ValidationError):
    pass


class NotUnimodular(ValidationError):
    pass


class UnknownExample(ValidationError):
    pass


class UnknownReportSection(ValidationError):
    pass


class RankDeficient(NumericalError):
    pass


class DegenerateMean(NumericalError):
    pass


class DegenerateProjection(NumericalError):
    pass


class DegenerateBasis(NumericalError):
    pass


class SingularGram(NumericalError):
    pass
