"""Positioned diagnostics for parsing and evaluation."""

from __future__ import annotations

from ..errors import SkewflowError


class DslError(SkewflowError):
    """A lexical, syntax, arity or unknown-identifier error at a source position."""

    def __init__(self, kind: str, message: str, line: int, col: int, expected=(), filename: str = "<input>"):
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(sorted(set(expected)))
        self.filename = filename
        super().__init__(self.format())

    def format(self) -> str:
        text = f"{self.filename}:{self.line}:{self.col}: {self.kind} error: {self.message}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        return text


class EvalError(SkewflowError, ArithmeticError):
    """Division by zero, log of a nonpositive value, non-finite or out-of-table results."""

    def __init__(self, kind: str, message: str, pos=(0, 0)):
        self.kind = kind
        self.pos = pos
        super().__init__(f"{pos[0]}:{pos[1]}: {kind}: {message}")
