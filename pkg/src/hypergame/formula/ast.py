"""Formula syntax tree.

Nodes are frozen dataclasses.  Source spans are carried along but do not
take part in equality or hashing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

Span = Optional[Tuple[int, int]]  # (line, column), both 1-based


class Node:
    __slots__ = ()


def _span():
    return field(default=None, compare=False, repr=False)


# state formulas ------------------------------------------------------------


@dataclass(frozen=True)
class StateQuant(Node):
    kind: str  # "forall" | "exists"
    var: str
    body: Node
    span: Span = _span()


@dataclass(frozen=True)
class StratQuant(Node):
    kind: str  # "E" | "A"
    agents: Tuple[int, ...]
    vars: Tuple[str, ...]
    body: Node
    span: Span = _span()


@dataclass(frozen=True)
class TrueF(Node):
    span: Span = _span()


@dataclass(frozen=True)
class Atom(Node):
    prop: str
    var: str
    span: Span = _span()


@dataclass(frozen=True)
class Not(Node):
    body: Node
    span: Span = _span()


@dataclass(frozen=True)
class And(Node):
    left: Node
    right: Node
    span: Span = _span()


@dataclass(frozen=True)
class Or(Node):
    left: Node
    right: Node
    span: Span = _span()


@dataclass(frozen=True)
class Implies(Node):
    left: Node
    right: Node
    span: Span = _span()


@dataclass(frozen=True)
class VarEq(Node):
    left: str
    right: str
    span: Span = _span()


@dataclass(frozen=True)
class ProbCompare(Node):
    left: Node
    op: str  # "<" "<=" "=" ">=" ">"
    right: Node
    span: Span = _span()


# probability expressions ---------------------------------------------------


@dataclass(frozen=True)
class ProbOf(Node):
    path: Node
    span: Span = _span()


@dataclass(frozen=True)
class Const(Node):
    value: Fraction
    span: Span = _span()


@dataclass(frozen=True)
class Arith(Node):
    op: str  # "+" "-" "*"; operands folded from the left
    operands: Tuple[Node, ...]
    span: Span = _span()


# path formulas -------------------------------------------------------------


@dataclass(frozen=True)
class Next(Node):
    body: Node
    span: Span = _span()


@dataclass(frozen=True)
class Until(Node):
    left: Node
    right: Node
    span: Span = _span()


@dataclass(frozen=True)
class Finally(Node):
    body: Node
    span: Span = _span()


@dataclass(frozen=True)
class Globally(Node):
    body: Node
    span: Span = _span()


PROB_NODES = (ProbOf, Const, Arith)
PATH_NODES = (Next, Until, Finally, Globally)
CMP_OPS = ("<", "<=", "=", ">=", ">")


def compare(op: str, a, b) -> bool:
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == "=":
        return a == b
    if op == ">=":
        return a >= b
    if op == ">":
        return a > b
    raise ValueError(f"unknown comparison {op!r}")


def children(node: Node) -> Tuple[Node, ...]:
    if isinstance(node, (StateQuant, StratQuant, Not, Next, Finally, Globally)):
        return (node.body,)
    if isinstance(node, (And, Or, Implies, ProbCompare, Until)):
        return (node.left, node.right)
    if isinstance(node, ProbOf):
        return (node.path,)
    if isinstance(node, Arith):
        return node.operands
    return ()


def walk(node: Node):
    """Pre-order traversal."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def split_prefix(f: Node):
    """Return ``([(kind, var), ...], matrix)`` for the state-quantifier prefix."""
    prefix = []
    while isinstance(f, StateQuant):
        prefix.append((f.kind, f.var))
        f = f.body
    return prefix, f


def support(node: Node) -> frozenset:
    """State variables read by atoms and equalities below ``node``."""
    out = set()
    for n in walk(node):
        if isinstance(n, Atom):
            out.add(n.var)
        elif isinstance(n, VarEq):
            out.add(n.left)
            out.add(n.right)
    return frozenset(out)


def size(node: Node) -> int:
    return sum(1 for _ in walk(node))
