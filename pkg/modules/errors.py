#!/usr/bin/env python3
"""
Error Module for the Bidegree Toolkit

This module defines the exception hierarchy shared by every library module.
Each error carries a stable ``error_code`` (written to the structured log) and
the ``exit_code`` the command-line surface terminates with.
"""

from typing import Any, Dict, Optional


class ExitCode:
    """Process exit statuses used by the CLI."""
    OK = 0
    PARSE = 2
    TOO_LARGE = 3
    SHAPE = 4
    WRONG_FORM = 5
    BAD_K = 6


class BidegreeError(Exception):
    """Base class for all toolkit errors."""

    error_code = "BIDEGREE_ERROR"
    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error_code": self.error_code,
            "exit_code": self.exit_code,
            "message": self.message,
            "details": self.details,
        }


# Input validation

class SequenceParseError(BidegreeError):
    """Raised when a sequence file cannot be parsed."""

    error_code = "PARSE_ERROR"
    exit_code = ExitCode.PARSE

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, path: Optional[str] = None):
        location = ""
        if line is not None:
            location = f" (line {line}, column {column})"
        super().__init__(f"{message}{location}",
                         {"line": line, "column": column, "path": path})
        self.line = line
        self.column = column


class LengthMismatchError(BidegreeError):
    error_code = "LENGTH_MISMATCH"
    exit_code = ExitCode.PARSE


class NegativeDegreeError(BidegreeError):
    error_code = "NEGATIVE_DEGREE"
    exit_code = ExitCode.PARSE


class SumMismatchError(BidegreeError):
    error_code = "SUM_MISMATCH"
    exit_code = ExitCode.PARSE


# Budget

class TooLargeError(BidegreeError):
    """Raised when exact counting would exceed the configured budget."""

    error_code = "TOO_LARGE"
    exit_code = ExitCode.TOO_LARGE


# Shape and graphicality

class ShapeMismatchError(BidegreeError):
    """Sequence is not of the shape a closed form requires."""

    error_code = "SHAPE_MISMATCH"
    exit_code = ExitCode.SHAPE


class BadShapeError(BidegreeError):
    error_code = "BAD_SHAPE"
    exit_code = ExitCode.SHAPE


class NotGraphicalError(BidegreeError):
    error_code = "NOT_GRAPHICAL"
    exit_code = ExitCode.SHAPE


class UnsupportedVariantError(BidegreeError):
    error_code = "UNSUPPORTED_VARIANT"
    exit_code = ExitCode.SHAPE


class ForeignGraphError(BidegreeError):
    """A graph whose degrees differ from the sequence it is checked against."""

    error_code = "FOREIGN_GRAPH"
    exit_code = ExitCode.SHAPE


class InvalidPatternError(BidegreeError):
    """Equality pattern with overlapping blocks or several suffix blocks."""

    error_code = "INVALID_PATTERN"
    exit_code = ExitCode.SHAPE


# Wrong sequence form for the requested operation

class WrongFormError(BidegreeError):
    error_code = "WRONG_FORM"
    exit_code = ExitCode.WRONG_FORM


class NotBalancedError(WrongFormError):
    error_code = "NOT_BALANCED"


class ZeroDegreeError(WrongFormError):
    error_code = "ZERO_DEGREE"


class DenominatorZeroError(WrongFormError):
    error_code = "DENOMINATOR_ZERO"


class EmptyX0Error(WrongFormError):
    error_code = "EMPTY_X0"


class DegenerateSequenceError(WrongFormError):
    error_code = "DEGENERATE_SEQUENCE"


class InsufficientMomentsError(WrongFormError):
    error_code = "INSUFFICIENT_MOMENTS"


class BadOrderError(WrongFormError):
    error_code = "BAD_ORDER"


class BadKError(BidegreeError):
    error_code = "BAD_K"
    exit_code = ExitCode.BAD_K
