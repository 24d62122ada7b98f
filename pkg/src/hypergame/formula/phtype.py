"""Polynomial-hierarchy type of a formula without state quantifiers."""
from __future__ import annotations

from dataclasses import dataclass

from .ast import (And, Arith, Atom, Const, Finally, Globally, Implies, Next, Not, Or, ProbCompare,
                  ProbOf, StateQuant, StratQuant, TrueF, Until, VarEq)
from .desugar import desugar


class HasStateQuantifier(ValueError):
    pass


_SYM = {"Delta": "Δ", "Sigma": "Σ", "Pi": "Π"}


@dataclass(frozen=True)
class PhType:
    shape: str  # "Delta" | "Sigma" | "Pi"
    level: int

    def __str__(self):
        return f"{_SYM[self.shape]}{self.level}"

    @property
    def ascii(self) -> str:
        return f"{self.shape}_{self.level}"


DELTA0 = PhType("Delta", 0)


def _max(types) -> PhType:
    """Delta_m if every type of the top level m is Delta, else Sigma_m."""
    m = max(t.level for t in types)
    top = [t for t in types if t.level == m]
    if all(t.shape == "Delta" for t in top):
        return PhType("Delta", m)
    return PhType("Sigma", m)


def _oracle(t: PhType) -> PhType:
    """P^t: Delta_l stays, Sigma_l (or Pi_l) gives Delta_{l+1}."""
    if t.shape == "Delta":
        return t
    return PhType("Delta", t.level + 1)


def _norm(t: PhType) -> PhType:
    return DELTA0 if t.level == 0 else t


def compute_ph_type(f) -> PhType:
    return _norm(_type(desugar(f)))


def _type(f) -> PhType:
    if isinstance(f, StateQuant):
        raise HasStateQuantifier("type is defined for formulas without state quantifiers")
    if isinstance(f, (TrueF, Atom, VarEq, Const)):
        return DELTA0
    if isinstance(f, Not):
        t = _type(f.body)
        if t.shape == "Sigma":
            return PhType("Pi", t.level)
        if t.shape == "Pi":
            return PhType("Sigma", t.level)
        return t
    if isinstance(f, (And, ProbCompare)):
        return _oracle(_max([_type(f.left), _type(f.right)]))
    if isinstance(f, Arith):
        return _oracle(_max([_type(o) for o in f.operands]))
    if isinstance(f, ProbOf):
        p = f.path
        if isinstance(p, Next):
            return _oracle(_type(p.body))
        if isinstance(p, Until):
            return _oracle(_max([_type(p.left), _type(p.right)]))
        raise TypeError("formula must be desugared")
    if isinstance(f, StratQuant):
        t = _type(f.body)
        shape = "Sigma" if f.kind == "E" else "Pi"
        if t.shape == "Delta":
            return PhType(shape, max(t.level, 1))
        return PhType(shape, t.level + 1)
    if isinstance(f, (Or, Implies, Finally, Globally)):
        raise TypeError("formula must be desugared")
    raise TypeError(f"no type for {type(f).__name__}")
