"""HyperSL with one agent per strategy variable, translated to HyperSt².

Concrete syntax (docs/hypersl.ebnf)::

    exists y1, y2. (p(pi1) U {forall z. (X q(pi2))[pi2:(y1, z)]}_pi1)[pi1:(y1, y2)]

State formulas are strategy quantifiers or a parenthesised path formula
followed by a binding block ``[path_var:(y_1, ..., y_k)]`` whose tuple
position ``g`` names the strategy of agent ``g``.  ``{state}_pi`` nests a
state formula evaluated from the current state of ``pi``.

Each path variable ``pi`` becomes a state variable of the same name that
starts in the init state.  While a path variable is not yet bound it
follows its *reference variable*, the path variable it branches from at
the current nesting level.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

from ..formula.ast import (And, Atom, Const, Finally, Globally, Implies, Next, Not, Or, ProbCompare,
                           ProbOf, StateQuant, StratQuant, TrueF, Until)
from ._lex import TokenStream


class HyperSLError(ValueError):
    pass


class NonUniqueAgent(HyperSLError):
    def __init__(self, var: str, detail: str = ""):
        self.var = var
        super().__init__(f"strategy variable {var!r} is not used for exactly one agent" + detail)


class DuplicateBinding(HyperSLError):
    def __init__(self, var: str):
        self.var = var
        super().__init__(f"path variable {var!r} is bound more than once")


# syntax --------------------------------------------------------------------


@dataclass(frozen=True)
class SQuant:
    kind: str  # "exists" | "forall"
    var: str
    body: object


@dataclass(frozen=True)
class SBind:
    path: object
    bindings: Tuple[Tuple[str, Tuple[str, ...]], ...]


@dataclass(frozen=True)
class LTrue:
    pass


@dataclass(frozen=True)
class LAtom:
    prop: str
    pvar: str


@dataclass(frozen=True)
class LNot:
    body: object


@dataclass(frozen=True)
class LAnd:
    left: object
    right: object


@dataclass(frozen=True)
class LOr:
    left: object
    right: object


@dataclass(frozen=True)
class LNext:
    body: object


@dataclass(frozen=True)
class LUntil:
    left: object
    right: object


@dataclass(frozen=True)
class LFinally:
    body: object


@dataclass(frozen=True)
class LGlobally:
    body: object


@dataclass(frozen=True)
class LState:
    state: object
    pvar: str


_UNARY = {"!": LNot, "X": LNext, "F": LFinally, "G": LGlobally}


class _Parser(TokenStream):
    def ident(self) -> str:
        t = self.cur
        if t.kind != "ident":
            self.fail("expected an identifier")
        return self.take().text

    def state(self):
        if self.at("exists", "forall"):
            kind = self.take().text
            names = [self.ident()]
            while self.at(","):
                self.take()
                names.append(self.ident())
            self.expect(".")
            body = self.state()
            for v in reversed(names):
                body = SQuant(kind, v, body)
            return body
        self.expect("(")
        path = self.path()
        self.expect(")")
        self.expect("[")
        binds = [self.binding()]
        while self.at(","):
            self.take()
            binds.append(self.binding())
        self.expect("]")
        return SBind(path, tuple(binds))

    def binding(self):
        pv = self.ident()
        self.expect(":")
        self.expect("(")
        ys = [self.ident()]
        while self.at(","):
            self.take()
            ys.append(self.ident())
        self.expect(")")
        return pv, tuple(ys)

    def path(self):
        n = self.conj()
        while self.at("|"):
            self.take()
            n = LOr(n, self.conj())
        return n

    def conj(self):
        n = self.until()
        while self.at("&"):
            self.take()
            n = LAnd(n, self.until())
        return n

    def until(self):
        left = self.unary()
        if self.at("U"):
            self.take()
            return LUntil(left, self.until())
        return left

    def unary(self):
        for op, cls in _UNARY.items():
            if self.at(op):
                self.take()
                return cls(self.unary())
        return self.primary()

    def primary(self):
        if self.at("("):
            self.take()
            n = self.path()
            self.expect(")")
            return n
        if self.at("{"):
            self.take()
            st = self.state()
            self.expect("}")
            t = self.take()
            if t.kind == "ident" and t.text.startswith("_") and len(t.text) > 1:
                return LState(st, t.text[1:])
            if t.text == "_":
                return LState(st, self.ident())
            raise HyperSLError(f"{t.line}:{t.col}: expected _pathvar after a nested state formula")
        if self.at("true"):
            self.take()
            return LTrue()
        prop = self.ident()
        if prop in ("U", "exists", "forall"):
            self.fail("expected a path formula")
        self.expect("(")
        pv = self.ident()
        self.expect(")")
        return LAtom(prop, pv)


def parse_hypersl(text: str):
    p = _Parser(text)
    f = p.state()
    p.end()
    return f


# dependency information ----------------------------------------------------


def _kids(n) -> tuple:
    if isinstance(n, SQuant):
        return (n.body,)
    if isinstance(n, SBind):
        return (n.path,)
    if isinstance(n, LState):
        return (n.state,)
    if isinstance(n, (LNot, LNext, LFinally, LGlobally)):
        return (n.body,)
    if isinstance(n, (LAnd, LOr, LUntil)):
        return (n.left, n.right)
    return ()


def _nodes(n):
    stack = [n]
    while stack:
        m = stack.pop()
        yield m
        stack.extend(reversed(_kids(m)))


def ref_var(f, pv: str) -> Optional[str]:
    """Reference variable of ``pv`` in ``f``; ``None`` when undefined."""
    if isinstance(f, LAtom):
        return pv if f.pvar == pv else None
    if isinstance(f, (LNot, LNext, LFinally, LGlobally)):
        return ref_var(f.body, pv)
    if isinstance(f, (LAnd, LOr, LUntil)):
        a, b = ref_var(f.left, pv), ref_var(f.right, pv)
        if a is None and b is None:
            return None
        if a == pv or b == pv:
            return pv
        return a if a is not None else b
    if isinstance(f, LState):
        if pv != f.pvar and ref_var(f.state, pv) is None:
            return None
        return f.pvar
    if isinstance(f, SQuant):
        return ref_var(f.body, pv)
    if isinstance(f, SBind):
        return ref_var(f.path, pv)
    if isinstance(f, LTrue):
        return None
    raise HyperSLError(f"not a HyperSL formula: {f!r}")


@dataclass
class DependencyInfo:
    agt: Dict[str, int]
    vars: Dict[str, FrozenSet[str]]
    refvar: Dict[Tuple[object, str], Optional[str]] = field(repr=False)
    path_vars: Tuple[str, ...] = ()
    num_agents: int = 0

    def ref(self, node, pv: str) -> Optional[str]:
        key = (node, pv)
        if key not in self.refvar:
            self.refvar[key] = ref_var(node, pv)
        return self.refvar[key]


def compute_dependency_info(f) -> DependencyInfo:
    if isinstance(f, str):
        f = parse_hypersl(f)
    path_vars: List[str] = []
    blocks: Dict[str, SBind] = {}
    agt: Dict[str, int] = {}
    quantified: List[str] = []
    arity = set()

    def scan(n, bound_paths: frozenset, bound_strats: frozenset):
        if isinstance(n, SQuant):
            if n.var in quantified:
                raise HyperSLError(f"strategy variable {n.var!r} is quantified more than once")
            quantified.append(n.var)
            scan(n.body, bound_paths, bound_strats | {n.var})
            return
        if isinstance(n, SBind):
            here = set()
            for pv, ys in n.bindings:
                if pv in path_vars:
                    raise DuplicateBinding(pv)
                path_vars.append(pv)
                here.add(pv)
                arity.add(len(ys))
                for g, y in enumerate(ys, start=1):
                    if y not in bound_strats:
                        raise HyperSLError(f"strategy variable {y!r} is not quantified")
                    if agt.setdefault(y, g) != g:
                        raise NonUniqueAgent(y)
                    if blocks.setdefault(y, n) is not n:
                        raise NonUniqueAgent(y, " (used in more than one binding block)")
            scan(n.path, bound_paths | here, bound_strats)
            return
        if isinstance(n, LAtom):
            if n.pvar not in bound_paths:
                raise HyperSLError(f"path variable {n.pvar!r} is not bound")
            return
        if isinstance(n, LState):
            if n.pvar not in bound_paths:
                raise HyperSLError(f"path variable {n.pvar!r} is not bound")
            # nested state formulas start afresh: outer paths are forgotten
            scan(n.state, frozenset(), bound_strats)
            return
        for c in _kids(n):
            scan(c, bound_paths, bound_strats)

    scan(f, frozenset(), frozenset())
    if len(arity) > 1:
        raise HyperSLError("strategy profiles of different lengths")
    unused = [y for y in quantified if y not in agt]
    if unused:
        raise HyperSLError(f"strategy variable {unused[0]!r} is never used")

    info = DependencyInfo(agt, {}, {}, tuple(path_vars), arity.pop() if arity else 0)
    for y, block in blocks.items():
        owners = {pv for pv, ys in block.bindings if y in ys}
        info.vars[y] = frozenset(pv for pv in path_vars if info.ref(block, pv) in owners)
    for n in _nodes(f):
        for pv in path_vars:
            info.ref(n, pv)
    return info


# translation ---------------------------------------------------------------


def _prob_one(path):
    return ProbCompare(ProbOf(path), "=", Const(Fraction(1)))


def translate_hypersl(f, names: Optional[Dict[str, str]] = None):
    """``forall x1 ... xl. (init(x1) & ... & init(xl)) -> T(f)``.

    State variable ``names[pi]`` (default: ``pi`` itself) follows path
    variable ``pi``.
    """
    if isinstance(f, str):
        f = parse_hypersl(f)
    info = compute_dependency_info(f)
    name = (lambda pv: names[pv]) if names else (lambda pv: pv)
    order = {pv: i for i, pv in enumerate(info.path_vars)}

    def T(n):
        if isinstance(n, SQuant):
            body = T(n.body)
            vs = sorted(info.vars[n.var], key=order.__getitem__)
            if not vs:
                return body
            kind = "E" if n.kind == "exists" else "A"
            return StratQuant(kind, (info.agt[n.var],), tuple(name(v) for v in vs), body)
        if isinstance(n, SBind):
            return T(n.path)
        if isinstance(n, LTrue):
            return TrueF()
        if isinstance(n, LAtom):
            return Atom(n.prop, name(n.pvar))
        if isinstance(n, LNot):
            return Not(T(n.body))
        if isinstance(n, LAnd):
            return And(T(n.left), T(n.right))
        if isinstance(n, LOr):
            return Or(T(n.left), T(n.right))
        if isinstance(n, LNext):
            return _prob_one(Next(T(n.body)))
        if isinstance(n, LUntil):
            return _prob_one(Until(T(n.left), T(n.right)))
        if isinstance(n, LFinally):
            return _prob_one(Finally(T(n.body)))
        if isinstance(n, LGlobally):
            return _prob_one(Globally(T(n.body)))
        if isinstance(n, LState):
            return T(n.state)
        raise HyperSLError(f"not a HyperSL formula: {n!r}")

    body = T(f)
    vs = [name(pv) for pv in info.path_vars]
    if not vs:
        return body
    guard = Atom("init", vs[0])
    for v in vs[1:]:
        guard = And(guard, Atom("init", v))
    out = Implies(guard, body)
    for v in reversed(vs):
        out = StateQuant("forall", v, out)
    return out
