"""Exception taxonomy shared by the whole package.

Two failure families matter downstream: bad inputs/configuration (the
caller can fix the call) and quantitative self-check failures (the
computation itself went wrong).  The CLI maps them to exit codes 2 and 1
respectively.
"""

from __future__ import annotations


class SinglapError(Exception):
    """Base class for everything raised deliberately by this package."""


class ConfigError(SinglapError, ValueError):
    """Invalid parameters, malformed input files, or inconsistent options."""


class FormatError(ConfigError):
    """A delimited input file violates the documented format.

    Carries the 1-based line number at which parsing failed, so the CLI
    can point users at the offending row.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericsError(SinglapError, RuntimeError):
    """A numerical self-check failed (drift, non-convergence, disagreement)."""
