"""Shared tokenizer and cursor for the poset / name / formula grammars."""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(ValueError):
    """Syntax error carrying a 1-based line/column position."""

    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # 'id' | 'int' | 'punct' | 'eof'
    text: str
    line: int
    col: int


_PUNCT = ("<", "{", "}", "(", ")", ",", ";", "=")

_ID_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.+|[]")


def tokenize(text):
    """Split text into identifier / integer / punctuation tokens.

    Identifiers may contain digits and the characters _ . + | [ ], which lets
    quotient-class and Boolean-element ids round-trip through the grammars.
    A token of digits only is an 'int'.
    """
    toks = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in _PUNCT:
            toks.append(Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        if ch in _ID_CHARS:
            j = i
            while j < n and text[j] in _ID_CHARS:
                j += 1
            word = text[i:j]
            kind = "int" if word.isdigit() else "id"
            toks.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


class Cursor:
    """Token stream with one-token lookahead."""

    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def current(self):
        return self.tokens[self.pos]

    def peek(self, text=None, kind=None):
        tok = self.current
        if text is not None and tok.text != text:
            return False
        if kind is not None and tok.kind != kind:
            return False
        return True

    def advance(self):
        tok = self.current
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def accept(self, text):
        if self.peek(text):
            return self.advance()
        return None

    def expect(self, text=None, kind=None, what=None):
        tok = self.current
        if (text is not None and tok.text != text) or (
            kind is not None and tok.kind != kind
        ):
            wanted = what or (repr(text) if text is not None else kind)
            got = tok.text or "end of input"
            raise ParseError(f"expected {wanted}, got {got!r}", tok.line, tok.col)
        return self.advance()

    def error(self, message):
        tok = self.current
        raise ParseError(message, tok.line, tok.col)

    def at_end(self):
        return self.current.kind == "eof"
