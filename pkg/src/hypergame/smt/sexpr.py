"""Minimal s-expression printer and reader for SMT-LIB text.

Terms are nested tuples of strings.  Binder lists are tuples of
``(name, sort)`` pairs and print as ``((x Real) (y Real))``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Union

Term = Union[str, tuple]


def num(v) -> str:
    v = Fraction(v)
    if v < 0:
        return f"(- {num(-v)})"
    if v.denominator == 1:
        return str(v.numerator)
    return f"(/ {v.numerator} {v.denominator})"


def dumps(t: Term) -> str:
    out: List[str] = []
    _write(t, out)
    return "".join(out)


def _write(t, out):
    if isinstance(t, str):
        out.append(t)
        return
    out.append("(")
    for i, x in enumerate(t):
        if i:
            out.append(" ")
        _write(x, out)
    out.append(")")


_TOK = re.compile(r'\s+|;[^\n]*|\(|\)|\|[^|]*\||"(?:[^"]|"")*"|[^\s()|";]+')


class SexprError(ValueError):
    pass


def loads_all(text: str) -> List[Term]:
    """Parse every top-level s-expression in ``text``."""
    stack: List[list] = [[]]
    pos = 0
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m:
            raise SexprError(f"bad input at offset {pos}")
        tok = m.group()
        pos = m.end()
        if tok[0].isspace() or tok[0] == ";":
            continue
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SexprError(f"unbalanced ')' at offset {pos - 1}")
            done = tuple(stack.pop())
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SexprError("unbalanced '('")
    return stack[0]


def loads(text: str) -> Term:
    got = loads_all(text)
    if len(got) != 1:
        raise SexprError(f"expected one expression, found {len(got)}")
    return got[0]
