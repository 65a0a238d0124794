"""Exception hierarchy and source positions used for diagnostics."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """A region of an input file; lines and columns are 1-based."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"span start after end: {self}")

    @classmethod
    def point(cls, file: str, line: int, col: int) -> SourceSpan:
        return cls(file, line, col, line, col)

    def to(self, other: SourceSpan) -> SourceSpan:
        return SourceSpan(self.file, self.start_line, self.start_col,
                          other.end_line, other.end_col)

    def __str__(self):
        return f"{self.file}:{self.start_line}:{self.start_col}"


class GrammaticError(Exception):
    """Base class for all user-facing errors.

    ``str(err)`` renders the ``file:line:col: error: message`` diagnostic
    line when a span is known.
    """

    severity = "error"

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def diagnostic(self) -> str:
        where = str(self.span) if self.span else "<unknown>"
        return f"{where}: {self.severity}: {self.message}"

    def __str__(self):
        return self.diagnostic() if self.span else self.message


class LexicalError(GrammaticError):
    pass


class ParseError(GrammaticError):
    """Syntax error carrying the set of tokens that would have been accepted."""

    def __init__(self, message: str, span: SourceSpan | None = None,
                 expected: frozenset[str] = frozenset()):
        if expected:
            message = f"{message}; expected one of: {', '.join(sorted(expected))}"
        super().__init__(message, span)
        self.expected = expected


class TemplateError(GrammaticError):
    pass


class ResolveError(GrammaticError):
    pass


class MetadataError(GrammaticError):
    pass


class AspectError(GrammaticError):
    pass


class GenerationError(GrammaticError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal message (warnings collected by weaving and generators)."""

    message: str
    span: SourceSpan | None = None
    severity: str = "warning"

    def __str__(self):
        where = str(self.span) if self.span else "<unknown>"
        return f"{where}: {self.severity}: {self.message}"
