"""Exception hierarchy for hpd-depth.

Every error raised by the library derives from ``HpdDepthError`` and also
from the builtin a caller would naturally catch, so ``except ValueError``
keeps working for bad input.  The CLI maps the classes onto exit codes:

    ParseError        -> 2
    DomainError       -> 3
    NumericalFailure  -> 4  (ConvergenceError included)
"""

from __future__ import annotations

from typing import Any


class HpdDepthError(Exception):
    """Base class for all library errors."""


class DomainError(HpdDepthError, ValueError):
    """An input violates a precondition (dimension, positivity, sample size)."""


class NumericalFailure(HpdDepthError, ArithmeticError):
    """A numerical routine failed (iteration cap, overflow, too many failures)."""


class ConvergenceError(NumericalFailure):
    """An iterative solver stopped without meeting its tolerance.

    Carries the last iterate and its residual so callers can decide whether
    the approximate answer is still usable.
    """

    def __init__(self, message: str, iterate: Any = None,
                 residual: float = float("nan"), iterations: int = 0):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual
        self.iterations = iterations


class ParseError(HpdDepthError, ValueError):
    """A sample, matrix or report file could not be parsed."""

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
