"""Tokenizer shared by grammar, aspect and query sources."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import LexicalError, SourceSpan

IDENT, STRING, INT, PUNCT, EOF = "IDENT", "STRING", "INT", "PUNCT", "EOF"

# longest first
MULTI_PUNCT = ("-->", "--", "||", "..", "{{", "}}", "[[", "]]")
SINGLE_PUNCT = frozenset(":;|()[]?*+<>,$#.{}=!^-/&@%")
_IDENT_START = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_DIGITS = frozenset("0123456789")
_IDENT_CHARS = _IDENT_START | _DIGITS
ESCAPES = {"n": "\n", "r": "\r", "t": "\t", "\\": "\\", "'": "'", '"': '"'}


@dataclass(frozen=True)
class Token:
    type: str
    value: str
    span: SourceSpan
    # quoting style for STRING tokens: "'", '"' or "<<"
    quote: str = ""
    # True when no whitespace separates this token from the previous one
    glued: bool = False

    def is_punct(self, *values: str) -> bool:
        return self.type == PUNCT and self.value in values

    def describe(self) -> str:
        if self.type == EOF:
            return "end of input"
        if self.type == STRING:
            return "string literal"
        return repr(self.value)


class Lexer:
    def __init__(self, text: str, file: str = "<string>"):
        self.text = text.replace("\r\n", "\n")
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _span_from(self, line: int, col: int) -> SourceSpan:
        return SourceSpan(self.file, line, col, self.line, max(self.col - 1, 1))

    def _error(self, message: str, line: int | None = None, col: int | None = None):
        raise LexicalError(message, SourceSpan.point(
            self.file, line or self.line, col or self.col))

    def _skip_trivia(self) -> bool:
        skipped = False
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c in " \t\n\r\f\v" or c == "\ufeff":
                self._advance()
                skipped = True
            elif text.startswith("//", self.pos):
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance()
                skipped = True
            else:
                break
        return skipped

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            gap = self._skip_trivia()
            glued = bool(out) and not gap
            if self.pos >= len(self.text):
                out.append(Token(EOF, "", SourceSpan.point(self.file, self.line, self.col)))
                return out
            out.append(self._token(glued))

    def _token(self, glued: bool) -> Token:
        text, line, col = self.text, self.line, self.col
        c = text[self.pos]
        if c in _IDENT_START:
            start = self.pos
            while self.pos < len(text) and text[self.pos] in _IDENT_CHARS:
                self._advance()
            return Token(IDENT, text[start:self.pos], self._span_from(line, col), glued=glued)
        if c in _DIGITS:
            start = self.pos
            while self.pos < len(text) and text[self.pos] in _DIGITS:
                self._advance()
            return Token(INT, text[start:self.pos], self._span_from(line, col), glued=glued)
        if c in "'\"":
            value = self._quoted(c)
            return Token(STRING, value, self._span_from(line, col), quote=c, glued=glued)
        if text.startswith("<<", self.pos):
            value = self._verbatim()
            return Token(STRING, value, self._span_from(line, col), quote="<<", glued=glued)
        for p in MULTI_PUNCT:
            if text.startswith(p, self.pos):
                self._advance(len(p))
                return Token(PUNCT, p, self._span_from(line, col), glued=glued)
        if c in SINGLE_PUNCT:
            self._advance()
            return Token(PUNCT, c, self._span_from(line, col), glued=glued)
        self._error(f"unexpected character {c!r}")

    def _quoted(self, q: str) -> str:
        line, col = self.line, self.col
        self._advance()
        chars = []
        text = self.text
        while True:
            if self.pos >= len(text) or text[self.pos] == "\n":
                self._error("unterminated string literal", line, col)
            c = text[self.pos]
            if c == q:
                self._advance()
                return "".join(chars)
            if c == "\\":
                if self.pos + 1 >= len(text) or text[self.pos + 1] not in ESCAPES:
                    bad = text[self.pos + 1] if self.pos + 1 < len(text) else ""
                    self._error(f"bad escape sequence '\\{bad}'")
                chars.append(ESCAPES[text[self.pos + 1]])
                self._advance(2)
                continue
            chars.append(c)
            self._advance()

    def _verbatim(self) -> str:
        line, col = self.line, self.col
        end = self.text.find(">>", self.pos + 2)
        if end < 0:
            self._error("unterminated <<...>> string", line, col)
        body = self.text[self.pos + 2:end]
        self._advance(end + 2 - self.pos)
        head = body.lstrip(" \t")
        if head.startswith("\n"):
            body = head[1:]
        tail = body.rstrip(" \t")
        if tail.endswith("\n"):
            body = tail[:-1]
        return body


def tokenize(text: str, file: str = "<string>") -> list[Token]:
    return Lexer(text, file).tokens()
