"""Nonlinear real arithmetic encoding of HyperSt² model checking.

Strategies are probabilistic with ``memory`` modes.  Every strategy
quantifier evaluated at a position of the composed state space opens its
own quantifier block: fresh strategy reals (plus mode-update and initial
mode pseudo-booleans when ``memory > 1``), the distribution constraints,
and an existential block of auxiliary variables that describe the body
under the new strategy assignment.  The auxiliary variables are determined
uniquely by the constraints once the strategy reals are fixed.

Variables of one scope (the root, or the body of one block):

* ``holds.n<i>.<pos>@<scope>``    truth of state subformula ``i`` at ``pos``
* ``hti.n<i>.<pos>@<scope>``      the same as 0/1
* ``prob.n<i>.<pos>@<scope>``     value of ``P(...)`` node ``i``
* ``d.n<i>.<pos>@<scope>``        ranking reals of Until nodes

A position fixes the state of every prefix variable and, with memory, the
mode of every (variable, agent) slot that has a strategy.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..checker import ONE
from ..formula.ast import (And, Arith, Atom, Const, Next, Not, ProbCompare, ProbOf, StratQuant,
                           TrueF, Until, VarEq, split_prefix, support)
from ..formula.desugar import desugar
from ..formula.wellformed import require_well_formed
from ..game import Tsg
from .sexpr import Term, dumps, num

_STATE_NODES = (TrueF, Atom, VarEq, Not, And, ProbCompare, StratQuant)


@dataclass
class Block:
    """One strategy-quantifier block, kept for inspection and tests."""
    index: int
    kind: str  # "E" | "A"
    agents: Tuple[int, ...]
    vars: Tuple[str, ...]
    position: str
    strategy_vars: List[str] = field(default_factory=list)
    mode_vars: List[str] = field(default_factory=list)
    estr: Dict[Tuple[int, int], Term] = field(default_factory=dict)  # (state, mode) -> constraint
    scope: int = 0


@dataclass
class ScopeInfo:
    index: int
    slots: Tuple[Tuple[str, int], ...]
    positions: int
    state_nodes: int
    prob_nodes: int
    until_nodes: int
    holds: List[str] = field(default_factory=list)
    hti: List[str] = field(default_factory=list)
    prob: List[str] = field(default_factory=list)
    d: List[str] = field(default_factory=list)


@dataclass
class SmtScript:
    logic: str
    decls: List[Tuple[str, str]]
    assertions: List[Term]
    blocks: List[Block] = field(default_factory=list)
    scopes: List[ScopeInfo] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.assertions


def _eq(a, b):
    return ("=", a, b)


def _and(parts):
    parts = [p for p in parts if p != "true"]
    if not parts:
        return "true"
    if len(parts) == 1:
        return parts[0]
    return ("and",) + tuple(parts)


def _or(parts):
    parts = [p for p in parts if p != "false"]
    if not parts:
        return "false"
    if len(parts) == 1:
        return parts[0]
    return ("or",) + tuple(parts)


def _mul(parts):
    parts = [p for p in parts if p != "1"]
    if not parts:
        return "1"
    if len(parts) == 1:
        return parts[0]
    return ("*",) + tuple(parts)


def _sum(parts):
    parts = [p for p in parts if p != "0"]
    if not parts:
        return "0"
    if len(parts) == 1:
        return parts[0]
    return ("+",) + tuple(parts)


_CMP = {"<": "<", "<=": "<=", "=": "=", ">=": ">=", ">": ">"}


class _Scope:
    def __init__(self, index: int, slots: Dict[Tuple[str, int], int], variables, game, memory):
        self.index = index
        self.slots = dict(slots)
        self.order = tuple(sorted(self.slots))
        self.slot_pos = {s: i for i, s in enumerate(self.order)}
        self.variables = variables
        self.memory = memory
        n = len(game.states)
        if memory > 1:
            modes = list(itertools.product(range(memory), repeat=len(self.order)))
        else:
            modes = [tuple(0 for _ in self.order)]
        self.positions = [(st, md) for st in itertools.product(range(n), repeat=len(variables)) for md in modes]
        self.decls: List[Tuple[str, str]] = []
        self.asserts: List[Term] = []
        self.names: Dict[tuple, str] = {}
        self.defined = set()
        self.info: Optional[ScopeInfo] = None

    def pos_name(self, pos) -> str:
        st, md = pos
        s = "_".join(map(str, st)) or "e"
        if self.memory > 1 and md:
            s += "~" + "_".join(map(str, md))
        return s

    def var(self, kind: str, nid: int, pos, sort: str) -> str:
        key = (kind, nid, pos)
        got = self.names.get(key)
        if got is None:
            got = f"{kind}.n{nid}.{self.pos_name(pos)}@{self.index}"
            self.names[key] = got
            self.decls.append((got, sort))
            getattr(self.info, kind).append(got)
        return got


class Encoder:
    def __init__(self, game: Tsg, formula, memory: int = 1, restrict_deterministic: bool = False):
        if memory < 1:
            raise ValueError("memory must be at least 1")
        self.game = game
        self.memory = memory
        self.det = restrict_deterministic
        f = desugar(formula)
        require_well_formed(f, game.num_agents, strict=False)
        self.prefix, self.matrix = split_prefix(f)
        self.variables = tuple(v for _, v in self.prefix)
        self.var_index = {v: i for i, v in enumerate(self.variables)}
        self.ids: Dict[int, int] = {}
        self._keep = []
        for i, n in enumerate(_preorder(self.matrix)):
            self.ids.setdefault(id(n), i)
            self._keep.append(n)
        self.blocks: List[Block] = []
        self.scopes: List[ScopeInfo] = []
        self._support: Dict[int, Tuple[str, ...]] = {}

    # naming -----------------------------------------------------------------
    def nid(self, node) -> int:
        return self.ids[id(node)]

    def sigma(self, j: int, s: int, a: str, q: int) -> str:
        ai = self.game.actions.index(a)
        name = f"sigma@{j}.s{s}.a{ai}"
        return name + (f".q{q}" if self.memory > 1 else "")

    def modef(self, j: int, s: int, q: int, q2: int) -> str:
        return f"modef@{j}.s{s}.q{q}.q{q2}"

    def initf(self, j: int, s: int, q: int) -> str:
        return f"initf@{j}.s{s}.q{q}"

    def support_of(self, node) -> Tuple[str, ...]:
        got = self._support.get(id(node))
        if got is None:
            got = tuple(sorted(support(node), key=self.var_index.__getitem__))
            self._support[id(node)] = got
        return got

    # scopes -----------------------------------------------------------------
    def new_scope(self, slots, root) -> _Scope:
        sc = _Scope(len(self.scopes), slots, self.variables, self.game, self.memory)
        region = list(_region(root))
        state_nodes = _unique(n for n in region if isinstance(n, _STATE_NODES))
        probs = _unique(n for n in region if isinstance(n, ProbOf))
        untils = [n for n in probs if isinstance(n.path, Until)]
        sc.info = ScopeInfo(sc.index, sc.order, len(sc.positions), len(state_nodes), len(probs), len(untils))
        self.scopes.append(sc.info)
        for n in state_nodes:
            for pos in sc.positions:
                self.define_holds(sc, n, pos)
        return sc

    def define_holds(self, sc: _Scope, node, pos) -> str:
        key = ("holds", self.nid(node), pos)
        h = sc.var("holds", self.nid(node), pos, "Bool")
        if key in sc.defined:
            return h
        sc.defined.add(key)
        hti = sc.var("hti", self.nid(node), pos, "Real")
        sc.asserts.append(_eq(h, self.state_term(sc, node, pos)))
        sc.asserts.append(_or([_and([_eq(hti, "1"), h]), _and([_eq(hti, "0"), ("not", h)])]))
        return h

    def holds(self, sc, node, pos) -> str:
        return self.define_holds(sc, node, pos)

    def hti(self, sc, node, pos) -> str:
        self.define_holds(sc, node, pos)
        return sc.names[("hti", self.nid(node), pos)]

    # state formulas -----------------------------------------------------------
    def state_term(self, sc: _Scope, node, pos) -> Term:
        st, _ = pos
        if isinstance(node, TrueF):
            return "true"
        if isinstance(node, Atom):
            s = st[self.var_index[node.var]]
            return "true" if node.prop in self.game.labels[s] else "false"
        if isinstance(node, VarEq):
            same = st[self.var_index[node.left]] == st[self.var_index[node.right]]
            return "true" if same else "false"
        if isinstance(node, Not):
            return ("not", self.holds(sc, node.body, pos))
        if isinstance(node, And):
            return ("and", self.holds(sc, node.left, pos), self.holds(sc, node.right, pos))
        if isinstance(node, ProbCompare):
            return (_CMP[node.op], self.expr(sc, node.left, pos), self.expr(sc, node.right, pos))
        if isinstance(node, StratQuant):
            return self.block(sc, node, pos)
        raise TypeError(f"unexpected node {type(node).__name__}")

    def expr(self, sc, node, pos) -> Term:
        if isinstance(node, Const):
            return num(node.value)
        if isinstance(node, Arith):
            return (node.op,) + tuple(self.expr(sc, o, pos) for o in node.operands)
        if isinstance(node, ProbOf):
            return self.prob(sc, node, pos)
        raise TypeError(f"unexpected node {type(node).__name__}")

    # strategy blocks ----------------------------------------------------------
    def block(self, sc: _Scope, node: StratQuant, pos) -> Term:
        game, k = self.game, self.memory
        j = len(self.blocks) + 1
        blk = Block(j, node.kind, node.agents, node.vars, sc.pos_name(pos))
        self.blocks.append(blk)
        binders = []
        estr = []
        for s in game.states_of(node.agents):
            for q in range(k):
                names = [self.sigma(j, s, a, q) for a in game.enabled[s]]
                parts = []
                for x in names:
                    binders.append((x, "Real"))
                    blk.strategy_vars.append(x)
                    parts.append(("<=", "0", x))
                    parts.append(("<=", x, "1"))
                    if self.det:
                        parts.append(("or", _eq(x, "0"), _eq(x, "1")))
                parts.append(_eq(_sum(names) if len(names) > 1 else names[0], "1"))
                c = _and(parts)
                blk.estr[(s, q)] = c
                estr.append(c)
        if k > 1:
            for s in range(len(game.states)):
                groups = [[self.modef(j, s, q, q2) for q2 in range(k)] for q in range(k)]
                groups.append([self.initf(j, s, q) for q in range(k)])
                for g in groups:
                    for x in g:
                        binders.append((x, "Real"))
                        blk.mode_vars.append(x)
                        estr.append(("or", _eq(x, "0"), _eq(x, "1")))
                    estr.append(_eq(("+",) + tuple(g), "1"))

        slots = dict(sc.slots)
        for v in node.vars:
            for g in node.agents:
                slots[(v, g)] = j
        inner = self.new_scope(slots, node.body)
        blk.scope = inner.index
        start = self._start_term(sc, inner, node, pos, j)
        body = _and(list(inner.asserts) + [start])
        if inner.decls:
            body = ("exists", tuple(inner.decls), body)
        guard = _and(estr)
        if node.kind == "E":
            return ("exists", tuple(binders), _and([guard, body]))
        return ("forall", tuple(binders), ("=>", guard, body))

    def _start_term(self, outer: _Scope, inner: _Scope, node: StratQuant, pos, j) -> Term:
        st, md = pos
        old = dict(zip(outer.order, md))
        if self.memory == 1:
            return self.holds(inner, node.body, (st, tuple(0 for _ in inner.order)))
        game = self.game
        options = []
        for qs in itertools.product(range(self.memory), repeat=len(node.vars)):
            init = dict(zip(node.vars, qs))
            modes = tuple(init[v] if v in init and g in node.agents else old[(v, g)]
                          for v, g in inner.order)
            conds = [_eq(self.initf(j, st[self.var_index[v]], q), "1") for v, q in init.items()]
            options.append(_and(conds + [self.holds(inner, node.body, (st, modes))]))
        return _or(options)

    # probabilities ------------------------------------------------------------
    def successors(self, sc: _Scope, names: Sequence[str], pos):
        """``[(pos', factors)]`` for one composed step of ``names``."""
        game = self.game
        st, md = pos
        per_var = []
        for v in names:
            i = self.var_index[v]
            s = st[i]
            owner = game.owner[s]
            j0 = sc.slots[(v, owner)]
            q0 = md[sc.slot_pos[(v, owner)]]
            my_slots = [sl for sl in sc.order if sl[0] == v]
            acts: Dict[int, List[Term]] = {}
            for a in game.enabled[s]:
                for t, p in game.succ[s][a]:
                    x = self.sigma(j0, s, a, q0)
                    acts.setdefault(t, []).append(x if p == ONE else ("*", num(p), x))
            opts = []
            if self.memory > 1:
                mode_choices = list(itertools.product(range(self.memory), repeat=len(my_slots)))
            else:
                mode_choices = [tuple(0 for _ in my_slots)]
            for t in sorted(acts):
                act_term = _sum(acts[t])
                for nq in mode_choices:
                    factors = [act_term]
                    if self.memory > 1:
                        for sl, q2 in zip(my_slots, nq):
                            factors.append(self.modef(sc.slots[sl], s, md[sc.slot_pos[sl]], q2))
                    opts.append((i, t, dict(zip(my_slots, nq)), factors))
            per_var.append(opts)
        out = []
        for combo in itertools.product(*per_var):
            nst = list(st)
            nmd = list(md)
            factors = []
            for i, t, nq, fs in combo:
                nst[i] = t
                for sl, q2 in nq.items():
                    nmd[sc.slot_pos[sl]] = q2
                factors.extend(fs)
            out.append(((tuple(nst), tuple(nmd)), _mul(factors)))
        return out

    def prob(self, sc: _Scope, node: ProbOf, pos) -> str:
        nid = self.nid(node)
        x = sc.var("prob", nid, pos, "Real")
        if ("prob", nid, pos) in sc.defined:
            return x
        sc.defined.add(("prob", nid, pos))
        names = self.support_of(node)
        path = node.path
        succ = self.successors(sc, names, pos)
        if isinstance(path, Next):
            terms = [_mul([c, self.hti(sc, path.body, nxt)]) for nxt, c in succ]
            sc.asserts.append(_eq(x, _sum(terms)))
            return x
        if not isinstance(path, Until):
            raise TypeError("path formula must be desugared")
        # successor values are only named here; every position gets its own
        # definition when the scope walks all positions
        h1 = self.holds(sc, path.left, pos)
        h2 = self.holds(sc, path.right, pos)
        d = sc.var("d", nid, pos, "Real")
        e_pr = _eq(x, _sum([_mul([c, sc.var("prob", nid, nxt, "Real")]) for nxt, c in succ]))
        loop = _or([_and([("true" if c == "1" else (">", c, "0")),
                          _or([self.holds(sc, path.right, nxt), (">", d, sc.var("d", nid, nxt, "Real"))])])
                    for nxt, c in succ])
        mid = _and([h1, ("not", h2)])
        sc.asserts.append(_and([
            ("=>", h2, _eq(x, "1")),
            ("=>", _and([("not", h1), ("not", h2)]), _eq(x, "0")),
            ("=>", mid, e_pr),
            ("=>", _and([mid, (">", x, "0")]), loop),
        ]))
        return x


def _preorder(node):
    from ..formula.ast import children
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def _region(root):
    """Nodes of a scope: everything except the bodies of strategy quantifiers."""
    from ..formula.ast import children
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        if not isinstance(n, StratQuant):
            stack.extend(reversed(children(n)))


def _unique(nodes):
    seen, out = set(), []
    for n in nodes:
        if id(n) not in seen:
            seen.add(id(n))
            out.append(n)
    return out


def encode(game: Tsg, f, memory: int = 1, restrict_deterministic: bool = False) -> SmtScript:
    """Encode ``game |= f`` as one satisfiability query."""
    enc = Encoder(game, f, memory, restrict_deterministic)
    root = enc.new_scope({}, enc.matrix)
    pos_of = lambda st: (st, ())  # noqa: E731

    def tru(i: int, st: tuple) -> Term:
        if i == len(enc.prefix):
            return enc.holds(root, enc.matrix, pos_of(st))
        parts = [tru(i + 1, st + (s,)) for s in range(len(game.states))]
        return _or(parts) if enc.prefix[i][0] == "exists" else _and(parts)

    top = tru(0, ())
    assertions = list(root.asserts) + [top]
    logic = "NRA" if enc.blocks else "QF_NRA"
    return SmtScript(logic, list(root.decls), assertions, enc.blocks, enc.scopes)


def emit_smtlib(script: SmtScript) -> str:
    lines = [f"(set-logic {script.logic})"]
    for name, sort in script.decls:
        lines.append(f"(declare-const {name} {sort})")
    for a in script.assertions:
        lines.append(dumps(("assert", a)))
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def parse_smtlib(text: str) -> SmtScript:
    """Read back text written by :func:`emit_smtlib` (no block metadata)."""
    from .sexpr import loads_all
    logic, decls, asserts = "ALL", [], []
    for cmd in loads_all(text):
        if not isinstance(cmd, tuple) or not cmd:
            raise ValueError(f"unexpected top-level item {cmd!r}")
        head = cmd[0]
        if head == "set-logic":
            logic = cmd[1]
        elif head == "declare-const":
            decls.append((cmd[1], dumps(cmd[2])))
        elif head == "declare-fun" and cmd[2] == ():
            decls.append((cmd[1], dumps(cmd[3])))
        elif head == "assert":
            asserts.append(cmd[1])
        elif head in ("check-sat", "exit", "set-info", "set-option"):
            continue
        else:
            raise ValueError(f"unsupported command {head!r}")
    return SmtScript(logic, decls, asserts)
