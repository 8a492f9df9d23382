"""
Exception hierarchy for ballotree.
The CLI maps every BallotreeError to exit status 2.
"""
from __future__ import annotations

from typing import Optional


class BallotreeError(Exception):
    """Base class for all library errors."""


class FormatError(BallotreeError, ValueError):
    """Malformed tournament bitstring or perfect-manipulator spec text."""


class DomainError(BallotreeError, ValueError):
    """A candidate, label or construction parameter is out of range."""


class ShapeError(BallotreeError, ValueError):
    """A tree shape precondition (usually power of two) does not hold."""


class BindingError(BallotreeError, KeyError):
    """A variable leaf was evaluated without a binding."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unbound variable '{self.name}'"


class CompileError(BallotreeError, ValueError):
    """An expression referenced an undeclared variable."""


class ScaleError(BallotreeError):
    """Exhaustive enumeration refused by the configured limit."""


class ParseError(BallotreeError, ValueError):
    """Tree or expression text could not be parsed."""

    def __init__(self, message: str, position: int, text: Optional[str] = None):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position
        self.text = text

    def annotate(self) -> str:
        """Render the offending line with a caret under the error position."""
        if self.text is None:
            return str(self)
        line_start = self.text.rfind("\n", 0, self.position) + 1
        line_end = self.text.find("\n", self.position)
        if line_end == -1:
            line_end = len(self.text)
        line = self.text[line_start:line_end]
        return f"{self}\n  {line}\n  {' ' * (self.position - line_start)}^"
