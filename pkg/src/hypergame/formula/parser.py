"""Recursive-descent parser for the formula language (see docs/grammar.ebnf).

Boolean and arithmetic operators share one precedence ladder, lowest first:

    ->  (right assoc)   |   &   !   comparison   + -   *

Operands are sort-checked: boolean operators need formulas, arithmetic and
comparisons need probability expressions.  Strategy quantifiers extend as
far to the right as possible.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, NamedTuple

from .ast import (CMP_OPS, PROB_NODES, And, Arith, Atom, Const, Finally, Globally, Implies, Next,
                  Not, Or, ProbCompare, ProbOf, StateQuant, StratQuant, TrueF, Until, VarEq)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        self.msg = message
        super().__init__(f"{line}:{col}: {message}")


class StateQuantNotPrefix(ParseError):
    pass


KEYWORDS = {"true", "forall", "exists", "P", "X", "U", "F", "G"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+/\d+|\d+\.\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:@[0-9]+)?)
  | (?P<op>->|<=|>=|==|[()\[\]{},.!&|+\-*<>=/])
""", re.VERBOSE)


class Tok(NamedTuple):
    kind: str  # num ident op eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "ws":
            nl = s.count("\n")
            if nl:
                line += nl
                line_start = pos + s.rfind("\n") + 1
        else:
            toks.append(Tok(kind, s, line, col))
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks


def _is_prob(n) -> bool:
    return isinstance(n, PROB_NODES)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, k=0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text, k=0) -> bool:
        t = self.peek(k)
        return t.kind in ("op", "ident") and t.text == text

    def next(self) -> Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, text) -> Tok:
        if not self.at(text):
            t = self.peek()
            self.fail(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def ident(self) -> Tok:
        t = self.peek()
        if t.kind != "ident" or t.text in KEYWORDS:
            self.fail(f"expected identifier, found {t.text or 'end of input'!r}")
        return self.next()

    def span(self, tok):
        return (tok.line, tok.col)

    # grammar
    def formula(self):
        t = self.peek()
        if self.at("forall") or self.at("exists"):
            kind = self.next().text
            var = self.ident().text
            self.expect(".")
            body = self.formula()
            return StateQuant(kind, var, body, span=self.span(t))
        f = self.expr()
        return f

    def want_formula(self, node, tok, what):
        if _is_prob(node):
            self.fail(f"probability expression used as a formula {what}", tok)
        return node

    def want_prob(self, node, tok, what):
        if not _is_prob(node):
            self.fail(f"formula used as a probability expression {what}", tok)
        return node

    def expr(self):
        return self.implies()

    def implies(self):
        t = self.peek()
        left = self.disj()
        if self.at("->"):
            op = self.next()
            self.want_formula(left, t, "left of '->'")
            t2 = self.peek()
            right = self.want_formula(self.implies(), t2, "right of '->'")
            return Implies(left, right, span=self.span(op))
        return left

    def disj(self):
        t = self.peek()
        left = self.conj()
        while self.at("|"):
            op = self.next()
            self.want_formula(left, t, "left of '|'")
            t2 = self.peek()
            right = self.want_formula(self.conj(), t2, "right of '|'")
            left = Or(left, right, span=self.span(op))
        return left

    def conj(self):
        t = self.peek()
        left = self.unary()
        while self.at("&"):
            op = self.next()
            self.want_formula(left, t, "left of '&'")
            t2 = self.peek()
            right = self.want_formula(self.unary(), t2, "right of '&'")
            left = And(left, right, span=self.span(op))
        return left

    def unary(self):
        if self.at("!"):
            op = self.next()
            t = self.peek()
            body = self.want_formula(self.unary(), t, "after '!'")
            return Not(body, span=self.span(op))
        return self.comparison()

    def comparison(self):
        t = self.peek()
        left = self.additive()
        if self.peek().kind == "op" and self.peek().text in CMP_OPS:
            op = self.next()
            self.want_prob(left, t, f"left of {op.text!r}")
            t2 = self.peek()
            right = self.want_prob(self.additive(), t2, f"right of {op.text!r}")
            if self.peek().kind == "op" and self.peek().text in CMP_OPS:
                self.fail("comparisons do not chain")
            return ProbCompare(left, op.text, right, span=self.span(op))
        return left

    def _chain(self, ops, sub):
        t = self.peek()
        left = sub()
        while self.peek().kind == "op" and self.peek().text in ops:
            op = self.peek()
            self.want_prob(left, t, f"left of {op.text!r}")
            operands = [left]
            while self.at(op.text):
                self.next()
                t2 = self.peek()
                operands.append(self.want_prob(sub(), t2, f"right of {op.text!r}"))
            left = Arith(op.text, tuple(operands), span=self.span(op))
        if self.at("/"):
            self.fail("division is not supported")
        return left

    def additive(self):
        return self._chain(("+", "-"), self.multiplicative)

    def multiplicative(self):
        return self._chain(("*",), self.primary)

    def primary(self):
        t = self.peek()
        if t.kind == "num":
            self.next()
            return Const(Fraction(t.text), span=self.span(t))
        if t.kind == "eof":
            self.fail("unexpected end of input")
        if self.at("("):
            self.next()
            inner = self.expr()
            self.expect(")")
            return inner
        if self.at("true"):
            self.next()
            return TrueF(span=self.span(t))
        if self.at("forall") or self.at("exists"):
            raise StateQuantNotPrefix("state quantifiers may only appear in the prefix", t.line, t.col)
        if self.at("P") and self.at("(", 1):
            return self.prob()
        if t.kind == "ident" and t.text in ("E", "A") and self.at("{", 1):
            return self.strat_quant()
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.next()
            if self.at("("):
                self.next()
                var = self.ident().text
                self.expect(")")
                return Atom(t.text, var, span=self.span(t))
            if self.at("=="):
                self.next()
                other = self.ident().text
                return VarEq(t.text, other, span=self.span(t))
            self.fail(f"expected '(' or '==' after {t.text!r}")
        self.fail(f"unexpected {t.text!r}")

    def strat_quant(self):
        t = self.next()
        self.expect("{")
        agents = []
        while True:
            a = self.peek()
            if a.kind != "num" or not a.text.isdigit():
                self.fail("expected agent number")
            self.next()
            agents.append(int(a.text))
            if self.at(","):
                self.next()
                continue
            break
        self.expect("}")
        self.expect("[")
        names = [self.ident().text]
        while self.at(","):
            self.next()
            names.append(self.ident().text)
        self.expect("]")
        tb = self.peek()
        body = self.want_formula(self.expr(), tb, "under a strategy quantifier")
        return StratQuant(t.text, tuple(agents), tuple(names), body, span=self.span(t))

    def prob(self):
        t = self.next()
        self.expect("(")
        for kw, cls in (("X", Next), ("F", Finally), ("G", Globally)):
            if self.at(kw):
                op = self.next()
                tb = self.peek()
                body = self.want_formula(self.expr(), tb, f"under {kw}")
                self.expect(")")
                return ProbOf(cls(body, span=self.span(op)), span=self.span(t))
        tl = self.peek()
        left = self.want_formula(self.expr(), tl, "left of 'U'")
        op = self.expect("U")
        tr = self.peek()
        right = self.want_formula(self.expr(), tr, "right of 'U'")
        self.expect(")")
        return ProbOf(Until(left, right, span=self.span(op)), span=self.span(t))


def parse_formula(text: str):
    """Parse a formula; raises ``ParseError`` with line and column."""
    p = _Parser(text)
    t = p.peek()
    f = p.formula()
    if p.peek().kind != "eof":
        p.fail(f"unexpected {p.peek().text!r}")
    inner = f
    while isinstance(inner, StateQuant):
        inner = inner.body
    if _is_prob(inner):
        raise ParseError("a probability expression is not a formula", t.line, t.col)
    return f


def parse_prob_expr(text: str):
    """Parse a probability expression such as ``P(F goal(x))``."""
    p = _Parser(text)
    t = p.peek()
    e = p.formula()
    if p.peek().kind != "eof":
        p.fail(f"unexpected {p.peek().text!r}")
    if not _is_prob(e):
        raise ParseError("expected a probability expression", t.line, t.col)
    return e
