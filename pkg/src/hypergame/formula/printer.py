"""Pretty printer whose output parses back to the same tree."""
from __future__ import annotations

from fractions import Fraction

from .ast import (And, Arith, Atom, Const, Finally, Globally, Implies, Next, Not, Or, ProbCompare,
                  ProbOf, StateQuant, StratQuant, TrueF, Until, VarEq)

_PREC = {StateQuant: 0, StratQuant: 0, Implies: 1, Or: 2, And: 3, Not: 4, ProbCompare: 5, Arith: 6}


def _prec(n) -> int:
    return _PREC.get(type(n), 9)


def _const(v: Fraction) -> str:
    if v < 0:
        return f"(0 - {_const(-v)})"
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _wrap(n, ok: bool) -> str:
    s = pretty(n)
    return s if ok else f"({s})"


def pretty(f) -> str:
    if isinstance(f, StateQuant):
        return f"{f.kind} {f.var}. {pretty(f.body)}"
    if isinstance(f, StratQuant):
        ags = ",".join(str(a) for a in f.agents)
        return f"{f.kind}{{{ags}}}[{', '.join(f.vars)}] {pretty(f.body)}"
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, Atom):
        return f"{f.prop}({f.var})"
    if isinstance(f, VarEq):
        return f"{f.left} == {f.right}"
    if isinstance(f, Not):
        return "!" + _wrap(f.body, _prec(f.body) >= 4)
    if isinstance(f, Implies):
        return f"{_wrap(f.left, _prec(f.left) > 1)} -> {_wrap(f.right, _prec(f.right) >= 1)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, _prec(f.left) >= 2)} | {_wrap(f.right, _prec(f.right) > 2)}"
    if isinstance(f, And):
        return f"{_wrap(f.left, _prec(f.left) >= 3)} & {_wrap(f.right, _prec(f.right) > 3)}"
    if isinstance(f, ProbCompare):
        return f"{_wrap(f.left, _prec(f.left) >= 6)} {f.op} {_wrap(f.right, _prec(f.right) >= 6)}"
    if isinstance(f, Arith):
        return f" {f.op} ".join(_wrap(o, _prec(o) > 6) for o in f.operands)
    if isinstance(f, Const):
        return _const(f.value)
    if isinstance(f, ProbOf):
        return f"P({pretty_path(f.path)})"
    raise TypeError(f"cannot print {type(f).__name__}")


def pretty_path(p) -> str:
    if isinstance(p, Next):
        return f"X {pretty(p.body)}"
    if isinstance(p, Finally):
        return f"F {pretty(p.body)}"
    if isinstance(p, Globally):
        return f"G {pretty(p.body)}"
    if isinstance(p, Until):
        return f"{_wrap(p.left, _prec(p.left) > 0)} U {pretty(p.right)}"
    raise TypeError(f"not a path formula: {type(p).__name__}")
