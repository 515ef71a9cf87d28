"""Exception hierarchy.

Every error carries its class name as the diagnostic tag printed by the CLI.
``ParseError`` subclasses map to exit code 1, ``AnalysisError`` subclasses to
exit code 2.
"""

from __future__ import annotations


class HtlFtirError(Exception):
    """Base class for all package errors."""


class ParseError(HtlFtirError, ValueError):
    """Input could not be read into a valid spectrum or configuration."""


class MalformedRow(ParseError):
    def __init__(self, line: int, detail: str = ""):
        self.line = line
        msg = f"line {line}: malformed row"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DuplicateWavenumber(ParseError):
    pass


class TooFewPoints(ParseError):
    pass


class NonFiniteValue(ParseError):
    pass


class IntensityOutOfRange(ParseError):
    pass


class NonIncreasingAxis(ParseError):
    pass


class UnknownYUnit(ParseError):
    pass


class UnsupportedEncoding(ParseError):
    pass


class MissingRecord(ParseError):
    pass


class PointCountMismatch(ParseError):
    pass


class UnsupportedXUnits(ParseError):
    pass


class ConfigError(ParseError):
    pass


class AnalysisError(HtlFtirError, ValueError):
    """A valid spectrum could not be carried through an analysis step."""


class StepTooLarge(AnalysisError):
    pass


class WindowTooLarge(AnalysisError):
    pass


class WindowOutOfRange(AnalysisError):
    pass


class NonUniformGrid(AnalysisError):
    pass


class UnitMismatch(AnalysisError):
    pass


class ZeroDenominator(AnalysisError):
    pass


class OverUnity(AnalysisError):
    pass
