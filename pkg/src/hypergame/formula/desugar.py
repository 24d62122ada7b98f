"""Rewrite derived operators into the core syntax.

``a | b`` becomes ``!(!a & !b)``, ``a -> b`` becomes ``!(a & !b)``,
``P(F f)`` becomes ``P(true U f)`` and ``P(G f)`` becomes
``1 - P(true U !f)``.
"""
from __future__ import annotations

from fractions import Fraction

from .ast import (And, Arith, Atom, Const, Finally, Globally, Implies, Next, Not, Or, ProbCompare,
                  ProbOf, StateQuant, StratQuant, TrueF, Until, VarEq)


def desugar(f):
    if isinstance(f, StateQuant):
        return StateQuant(f.kind, f.var, desugar(f.body), span=f.span)
    if isinstance(f, StratQuant):
        return StratQuant(f.kind, f.agents, f.vars, desugar(f.body), span=f.span)
    if isinstance(f, (TrueF, Atom, VarEq, Const)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.body), span=f.span)
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right), span=f.span)
    if isinstance(f, Or):
        return Not(And(Not(desugar(f.left)), Not(desugar(f.right))), span=f.span)
    if isinstance(f, Implies):
        return Not(And(desugar(f.left), Not(desugar(f.right))), span=f.span)
    if isinstance(f, ProbCompare):
        return ProbCompare(desugar(f.left), f.op, desugar(f.right), span=f.span)
    if isinstance(f, Arith):
        return Arith(f.op, tuple(desugar(o) for o in f.operands), span=f.span)
    if isinstance(f, ProbOf):
        p = f.path
        if isinstance(p, Next):
            return ProbOf(Next(desugar(p.body), span=p.span), span=f.span)
        if isinstance(p, Until):
            return ProbOf(Until(desugar(p.left), desugar(p.right), span=p.span), span=f.span)
        if isinstance(p, Finally):
            return ProbOf(Until(TrueF(), desugar(p.body), span=p.span), span=f.span)
        if isinstance(p, Globally):
            inner = ProbOf(Until(TrueF(), Not(desugar(p.body)), span=p.span), span=f.span)
            return Arith("-", (Const(Fraction(1)), inner), span=f.span)
    raise TypeError(f"cannot desugar {type(f).__name__}")


def is_core(f) -> bool:
    from .ast import walk
    return not any(isinstance(n, (Or, Implies, Finally, Globally)) for n in walk(f))
