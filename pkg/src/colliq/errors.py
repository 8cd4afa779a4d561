"""Exception hierarchy for colliq."""

import numpy as np


class ColliqError(Exception):
    """Base class for all library errors."""


class DimensionError(ColliqError, ValueError):
    """Operand shapes are not conformable."""


class SingularMatrixError(ColliqError, np.linalg.LinAlgError):
    """A linear system is singular to working precision.

    Attributes
    ----------
    condition : float
        Ratio of the largest to the smallest pivot magnitude, a cheap
        lower bound on the 1-norm condition number.
    """

    def __init__(self, message, condition=np.inf):
        super().__init__(message)
        self.condition = condition


class DomainError(ColliqError, ValueError):
    """A point lies outside the open domain of a transfer function."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ArgumentError(ColliqError, ValueError):
    """An argument is out of range or inconsistent with the partition."""


class NotIsometricError(ColliqError, ValueError):
    """A colligation expected to be isometric is not."""

    def __init__(self, message, residual=np.nan):
        super().__init__(message)
        self.residual = residual


class StructureError(ColliqError, ValueError):
    """A colligation fails a required block-structure check.

    The failing :class:`~colliq.structure.StructureReport` is attached as
    ``report`` when available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoWitnessError(StructureError):
    """No rank-one witness pair exists for the zero-origin case 2."""


class ZeroConstantError(ColliqError, ValueError):
    """The constant term vanishes where a non-zero one is required.

    Use the zero-origin factorizations for functions vanishing at 0.
    """


class VerificationError(ColliqError, ArithmeticError):
    """A transfer-function identity failed its numerical verification."""

    def __init__(self, message, residual=np.nan):
        super().__init__(message)
        self.residual = residual


class ParseError(ColliqError, ValueError):
    """A colligation document is not well-formed text."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(ColliqError, ValueError):
    """A colligation document is well-formed but has the wrong shape."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
