"""Shared tokenizer for the source-logic parsers."""
from __future__ import annotations

import re
from typing import List

from ..formula.parser import ParseError, Tok

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+/\d+|\d+\.\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><<|>>|->|<=|>=|==|[()\[\]{},.:!&|+\-<>=/])
""", re.VERBOSE)


def lex(text: str) -> List[Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        s = m.group()
        if m.lastgroup == "ws":
            if "\n" in s:
                line += s.count("\n")
                line_start = pos + s.rfind("\n") + 1
        else:
            toks.append(Tok(m.lastgroup, s, line, col))
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks


class TokenStream:
    def __init__(self, text: str):
        self.toks = lex(text)
        self.i = 0

    @property
    def cur(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts) -> bool:
        t = self.cur
        return t.kind in ("op", "ident") and t.text in texts

    def take(self) -> Tok:
        t = self.cur
        self.i += 1
        return t

    def expect(self, text: str) -> Tok:
        if self.cur.text != text or self.cur.kind not in ("op", "ident"):
            self.fail(f"expected {text!r}")
        return self.take()

    def fail(self, msg: str):
        t = self.cur
        found = t.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", t.line, t.col)

    def end(self):
        if self.cur.kind != "eof":
            self.fail("unexpected trailing input")
