"""Tokenizer for .skw sources.

Newlines end statements except inside brackets; ``#`` starts a comment.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .diagnostics import DslError

PUNCT = {"+", "-", "*", "/", "^", "(", ")", "[", "]", ",", "="}
OPENERS, CLOSERS = "([", ")]"

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER, IDENT, STRING, NEWLINE, EOF or the punctuation itself
    text: str
    line: int
    col: int
    value: float | str | None = None


def tokenize(source: str, filename: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    depth = 0
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            if depth == 0:
                tokens.append(Token("NEWLINE", "\n", line, col))
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            m = _NUMBER.match(source, i)
            text = m.group(0)
            value = float(text)
            if not math.isfinite(value):
                raise DslError("lexical", f"number {text!r} is out of range", line, col, filename=filename)
            tokens.append(Token("NUMBER", text, line, col, value))
            i, col = i + len(text), col + len(text)
            continue
        if ch.isalpha() or ch == "_":
            text = _IDENT.match(source, i).group(0)
            tokens.append(Token("IDENT", text, line, col, text))
            i, col = i + len(text), col + len(text)
            continue
        if ch == '"':
            j = i + 1
            while j < n and source[j] not in '"\n':
                j += 1
            if j >= n or source[j] != '"':
                raise DslError("lexical", "unterminated string", line, col, filename=filename)
            text = source[i:j + 1]
            tokens.append(Token("STRING", text, line, col, source[i + 1:j]))
            col += j + 1 - i
            i = j + 1
            continue
        if ch in PUNCT:
            if ch in OPENERS:
                depth += 1
            elif ch in CLOSERS:
                depth = max(0, depth - 1)
            tokens.append(Token(ch, ch, line, col))
            i, col = i + 1, col + 1
            continue
        raise DslError("lexical", f"unexpected character {ch!r}", line, col, filename=filename)
    tokens.append(Token("EOF", "", line, col))
    return tokens
