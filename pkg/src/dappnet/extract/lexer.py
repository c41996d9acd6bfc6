"""Tokenizer for the supported Solidity subset."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List

IDENT = "ident"
NUMBER = "number"
STRING = "string"
PUNCT = "punct"


class LexError(ValueError):
    def __init__(self, message: str, line: int, path: str = "") -> None:
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.path = path


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int

    def __repr__(self) -> str:
        return f"Token({self.text!r}@{self.line})"


_IDENT_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_NUMBER_RE = re.compile(
    r"0[xX][0-9a-fA-F_]+|(?:[0-9][0-9_]*)?\.?[0-9][0-9_]*(?:[eE][-+]?[0-9_]+)?"
)
# multi-character operators first so "=>" and "++" stay whole
_PUNCT_RE = re.compile(
    r">>>=|<<=|>>=|\*\*|=>|==|!=|<=|>=|&&|\|\||\+\+|--|\+=|-=|\*=|/=|%=|\|=|&=|\^=|<<|>>|->|:=|[{}()\[\];,.?:=<>+\-*/%!~&|^@]"
)


def tokenize_text(text: str, path: str = "") -> List[Token]:
    """Split source text into tokens, dropping whitespace and comments.

    String literal contents are kept as one opaque STRING token, so
    nothing quoted can ever look like an identifier or a call.
    """
    tokens: List[Token] = []
    i = 0
    n = len(text)
    line = 1
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
            continue
        if c.isspace():
            i += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                raise LexError("unterminated block comment", line, path)
            line += text.count("\n", i, j)
            i = j + 2
            continue
        if c == '"' or c == "'":
            start_line = line
            j = i + 1
            while True:
                if j >= n or text[j] == "\n":
                    raise LexError("unterminated string literal", start_line, path)
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == c:
                    break
                j += 1
            tokens.append(Token(STRING, text[i : j + 1], start_line))
            i = j + 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(Token(IDENT, m.group(), line))
            i = m.end()
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER_RE.match(text, i)
            if m and m.end() > i:
                tokens.append(Token(NUMBER, m.group(), line))
                i = m.end()
                continue
        m = _PUNCT_RE.match(text, i)
        if m:
            tokens.append(Token(PUNCT, m.group(), line))
            i = m.end()
            continue
        # stray characters (e.g. unicode in identifiers we do not support)
        tokens.append(Token(PUNCT, c, line))
        i += 1
    return tokens
