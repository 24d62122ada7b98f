"""PATL and PATL with Nash-equilibrium operators, embedded into HyperSt².

Concrete syntax (docs/patl.ebnf)::

    <<1,2>> P>=1/2 [F t]
    <<1:2>> max>=3/2 (P[F t1] + P[F t2])
    !(p & <<1>> P<1 [X q]) -> <<>> P=1 [p U q]

Rewards (``R``) and step-bounded operators (``U<=k``, ``F<=k``) are
recognised only so they can be rejected with ``UnsupportedConstruct``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from ..formula.ast import (CMP_OPS, And, Arith, Atom, Const, Finally, Globally, Implies, Next, Not, Or,
                           ProbCompare, ProbOf, StateQuant, StratQuant, TrueF, Until, VarEq)
from ._lex import TokenStream


class PatlError(ValueError):
    pass


class UnsupportedConstruct(PatlError):
    pass


class QuantifierInObjective(PatlError):
    pass


class NestedNE(PatlError):
    pass


# source syntax -------------------------------------------------------------


@dataclass(frozen=True)
class PTrue:
    pass


@dataclass(frozen=True)
class PAtom:
    name: str


@dataclass(frozen=True)
class PNot:
    body: object


@dataclass(frozen=True)
class PBin:
    op: str  # "&" "|" "->"
    left: object
    right: object


@dataclass(frozen=True)
class PStrat:
    """``<<A>> P~q [path]``"""
    agents: Tuple[int, ...]
    op: str
    bound: Fraction
    path: object


@dataclass(frozen=True)
class PNash:
    """``<<C:C'>> max~x (P[path] + P[path])``"""
    coalition: Tuple[int, ...]
    others: Tuple[int, ...]
    op: str
    bound: Fraction
    first: object
    second: object


@dataclass(frozen=True)
class PNext:
    body: object


@dataclass(frozen=True)
class PUntil:
    left: object
    right: object


@dataclass(frozen=True)
class PFinally:
    body: object


@dataclass(frozen=True)
class PGlobally:
    body: object


_RESERVED = {"true", "P", "R", "X", "U", "F", "G", "max", "min"}


class _Parser(TokenStream):
    def state(self):
        left = self.disj()
        if self.at("->"):
            self.take()
            return PBin("->", left, self.state())
        return left

    def disj(self):
        n = self.conj()
        while self.at("|"):
            self.take()
            n = PBin("|", n, self.conj())
        return n

    def conj(self):
        n = self.unary()
        while self.at("&"):
            self.take()
            n = PBin("&", n, self.unary())
        return n

    def unary(self):
        if self.at("!"):
            self.take()
            return PNot(self.unary())
        return self.primary()

    def primary(self):
        t = self.cur
        if self.at("("):
            self.take()
            n = self.state()
            self.expect(")")
            return n
        if self.at("<<"):
            return self.quantified()
        if t.kind == "ident":
            if t.text == "true":
                self.take()
                return PTrue()
            if t.text == "R":
                raise UnsupportedConstruct(f"{t.line}:{t.col}: reward operators are not supported")
            if t.text in _RESERVED:
                self.fail("expected a state formula")
            self.take()
            return PAtom(t.text)
        self.fail("expected a state formula")

    def agents(self, stop: Sequence[str]) -> Tuple[int, ...]:
        out = []
        while not self.at(*stop):
            t = self.take()
            if t.kind != "num" or not t.text.isdigit():
                raise PatlError(f"{t.line}:{t.col}: expected an agent number, found {t.text!r}")
            out.append(int(t.text))
            if self.at(","):
                self.take()
        return tuple(sorted(set(out)))

    def comparison(self):
        t = self.take()
        if t.kind != "op" or t.text not in CMP_OPS:
            raise PatlError(f"{t.line}:{t.col}: expected a comparison, found {t.text!r}")
        n = self.take()
        if n.kind != "num":
            raise PatlError(f"{n.line}:{n.col}: expected a rational bound, found {n.text!r}")
        return t.text, Fraction(n.text)

    def quantified(self):
        self.expect("<<")
        coalition = self.agents((">>", ":"))
        if self.at(":"):
            self.take()
            others = self.agents((">>",))
            self.expect(">>")
            if self.at("min"):
                raise UnsupportedConstruct("only max equilibrium objectives are supported")
            self.expect("max")
            op, bound = self.comparison()
            self.expect("(")
            first = self.prob_path()
            self.expect("+")
            second = self.prob_path()
            self.expect(")")
            return PNash(coalition, others, op, bound, first, second)
        self.expect(">>")
        if self.at("R"):
            raise UnsupportedConstruct("reward operators are not supported")
        self.expect("P")
        op, bound = self.comparison()
        self.expect("[")
        path = self.path()
        self.expect("]")
        return PStrat(coalition, op, bound, path)

    def prob_path(self):
        if self.at("R"):
            raise UnsupportedConstruct("reward objectives are not supported")
        self.expect("P")
        self.expect("[")
        p = self.path()
        self.expect("]")
        return p

    def _no_bound(self, what):
        if self.at("<=", "<", "[") and what != "X":
            raise UnsupportedConstruct(f"step-bounded {what} is not supported")

    def path(self):
        for op, cls in (("X", PNext), ("F", PFinally), ("G", PGlobally)):
            if self.at(op):
                self.take()
                self._no_bound(op)
                return cls(self.state())
        left = self.state()
        self.expect("U")
        self._no_bound("U")
        return PUntil(left, self.state())


def parse_patl(text: str):
    p = _Parser(text)
    f = p.state()
    p.end()
    return f


def parse_patl_path(text: str):
    p = _Parser(text)
    f = p.path()
    p.end()
    return f


# translation ---------------------------------------------------------------


def _check_agents(agents, num_agents):
    bad = [a for a in agents if not 1 <= a <= num_agents]
    if bad:
        raise PatlError(f"agent {bad[0]} outside 1..{num_agents}")


def _complement(agents, num_agents):
    return tuple(a for a in range(1, num_agents + 1) if a not in agents)


def _strat_block(kind_agents: List[Tuple[str, Tuple[int, ...]]], vars_, body):
    for kind, agents in reversed(kind_agents):
        if agents:
            body = StratQuant(kind, agents, tuple(vars_), body)
    return body


def _state(f, x: str, n: int):
    if isinstance(f, PTrue):
        return TrueF()
    if isinstance(f, PAtom):
        return Atom(f.name, x)
    if isinstance(f, PNot):
        return Not(_state(f.body, x, n))
    if isinstance(f, PBin):
        cls = {"&": And, "|": Or, "->": Implies}[f.op]
        return cls(_state(f.left, x, n), _state(f.right, x, n))
    if isinstance(f, PStrat):
        _check_agents(f.agents, n)
        for sub in _walk(f.path):
            if isinstance(sub, PNash):
                raise NestedNE("Nash equilibrium nested inside a strategy quantifier")
        cmp = ProbCompare(ProbOf(_path(f.path, x, n)), f.op, Const(f.bound))
        return _strat_block([("E", f.agents), ("A", _complement(f.agents, n))], [x], cmp)
    if isinstance(f, PNash):
        raise UnsupportedConstruct("Nash equilibrium operator; use the PATL-1NE translation")
    raise PatlError(f"not a PATL state formula: {f!r}")


def _path(p, x: str, n: int):
    if isinstance(p, PNext):
        return Next(_state(p.body, x, n))
    if isinstance(p, PFinally):
        return Finally(_state(p.body, x, n))
    if isinstance(p, PGlobally):
        return Globally(_state(p.body, x, n))
    if isinstance(p, PUntil):
        return Until(_state(p.left, x, n), _state(p.right, x, n))
    raise PatlError(f"not a PATL path formula: {p!r}")


def _walk(f):
    stack = [f]
    while stack:
        n = stack.pop()
        yield n
        for attr in ("body", "left", "right", "path", "first", "second"):
            c = getattr(n, attr, None)
            if c is not None:
                stack.append(c)


def _as_state(f):
    return parse_patl(f) if isinstance(f, str) else f


def translate_patl(f, num_agents: int, var: str = "x"):
    """Embed a PATL state formula: ``forall x. init(x) -> ...``."""
    body = _state(_as_state(f), var, num_agents)
    return StateQuant("forall", var, Implies(Atom("init", var), body))


def _ne_vars(index: int):
    return tuple(f"{b}@{index}" for b in ("s0", "s0'", "s1", "s1'", "s2", "s2'"))


def _objective(p, num_agents):
    for sub in _walk(p):
        if isinstance(sub, PNash):
            raise NestedNE("Nash equilibrium nested inside an equilibrium objective")
        if isinstance(sub, PStrat):
            raise QuantifierInObjective("equilibrium objectives must be free of strategy quantifiers")
    return lambda v: ProbOf(_path(p, v, num_agents))


def _swsp_parts(psi1, psi2, coalition, relation, bound, epsilon, num_agents, index):
    """Prefix and matrix of the SW-SP-eps-NE construction."""
    if isinstance(psi1, str):
        psi1 = parse_patl_path(psi1)
    if isinstance(psi2, str):
        psi2 = parse_patl_path(psi2)
    coalition = tuple(sorted(set(coalition)))
    _check_agents(coalition, num_agents)
    if relation not in CMP_OPS:
        raise PatlError(f"unknown relation {relation!r}")
    eps = Const(Fraction(epsilon))
    ags = tuple(range(1, num_agents + 1))
    others = _complement(coalition, num_agents)
    P1 = _objective(psi1, num_agents)
    P2 = _objective(psi2, num_agents)
    s0, s0p, s1, s1p, s2, s2p = _ne_vars(index)

    def sp(a, b):
        parts = []
        for agents, P in ((coalition, P1), (others, P2)):
            cmp = ProbCompare(P(a), ">=", Arith("-", (P(b), eps)))
            parts.append(StratQuant("A", agents, (b,), cmp) if agents else cmp)
        return And(parts[0], parts[1])

    sw = ProbCompare(Arith("+", (P1(s0), P2(s0))), ">=", Arith("+", (P1(s0p), P2(s0p))))
    best = StratQuant("A", ags, (s0p, s2, s2p), Implies(sp(s2, s2p), sw))
    welfare = ProbCompare(Arith("+", (P1(s0), P2(s0))), relation, Const(Fraction(bound)))
    swsp = StratQuant("E", ags, (s0, s1, s1p), And(And(welfare, sp(s1, s1p)), best))
    guard = And(And(Atom("init", s0), Atom("init", s0p)), VarEq(s1, s1p))
    matrix = Implies(guard, And(VarEq(s2, s2p), swsp))
    prefix = [("forall", s0), ("forall", s0p), ("forall", s1), ("forall", s1p),
              ("exists", s2), ("exists", s2p)]
    return prefix, matrix


def _close(prefix, matrix):
    for kind, v in reversed(prefix):
        matrix = StateQuant(kind, v, matrix)
    return matrix


def translate_swsp_ne(psi1, psi2, coalition, relation: str, bound, epsilon, num_agents: int,
                      index: int = 1):
    """HyperSt² formula for ``<<C:C'>>max~x (P[psi1] + P[psi2])`` at the init state."""
    return _close(*_swsp_parts(psi1, psi2, coalition, relation, bound, epsilon, num_agents, index))


def _flip(kind):
    return "exists" if kind == "forall" else "forall"


def translate_patl_1ne(f, num_agents: int, epsilon=0, var: str = "x"):
    """Translate a PATL-1NE formula, hoisting each equilibrium's quantifiers."""
    f = _as_state(f)
    prefix: List[Tuple[str, str]] = []
    uses_x = [False]
    counter = [0]

    def top(g, positive: bool):
        if isinstance(g, PNash):
            _check_agents(g.coalition + g.others, num_agents)
            if g.others and set(g.others) != set(_complement(g.coalition, num_agents)):
                raise PatlError("the second coalition must be the complement of the first")
            counter[0] += 1
            pre, mat = _swsp_parts(g.first, g.second, g.coalition, g.op, g.bound, epsilon,
                                   num_agents, counter[0])
            prefix.extend(pre if positive else [(_flip(k), v) for k, v in pre])
            return mat
        if isinstance(g, PNot):
            return Not(top(g.body, not positive))
        if isinstance(g, PBin):
            left = top(g.left, positive if g.op != "->" else not positive)
            cls = {"&": And, "|": Or, "->": Implies}[g.op]
            return cls(left, top(g.right, positive))
        uses_x[0] = True
        return _state(g, var, num_agents)

    matrix = top(f, True)
    if uses_x[0]:
        matrix = Implies(Atom("init", var), matrix)
        prefix.insert(0, ("forall", var))
    return _close(prefix, matrix)


def embed_path(p, var: str, num_agents: int):
    """PATL path formula with every atom indexed by ``var``."""
    if isinstance(p, str):
        p = parse_patl_path(p)
    return _path(p, var, num_agents)
