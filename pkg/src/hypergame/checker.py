"""Brute-force model checker over memoryless or bounded-memory deterministic strategies.

Probabilities are computed exactly.  ``P(...)`` is evaluated on the product
of the chains of the variables its path formula actually reads; the chains
of the other variables are independent and do not change the result.
"""
from __future__ import annotations

import itertools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .formula.ast import (And, Arith, Atom, Const, Next, Not, ProbCompare, ProbOf, StateQuant, StratQuant,
                          TrueF, Until, VarEq, compare, split_prefix, support)
from .formula.desugar import desugar
from .formula.wellformed import require_well_formed
from .game import StrategyAutomaton, Tsg, enumerate_kmem_det_strategies, enumerate_md_strategies
from .linalg import until_values

ONE = Fraction(1)
ZERO = Fraction(0)


class StrategyLimitExceeded(RuntimeError):
    pass


class PrefixMismatch(ValueError):
    pass


@dataclass(frozen=True)
class StrategyClass:
    memory: int = 1  # 1 means memoryless

    @classmethod
    def parse(cls, text) -> "StrategyClass":
        if isinstance(text, StrategyClass):
            return text
        if text in (None, "md", "MD"):
            return cls(1)
        m = re.fullmatch(r"kmem:(\d+)", str(text))
        if not m or int(m.group(1)) < 1:
            raise ValueError(f"unknown strategy class {text!r}; use 'md' or 'kmem:K'")
        return cls(int(m.group(1)))

    def __str__(self):
        return "md" if self.memory == 1 else f"kmem:{self.memory}"


class EvalContext:
    """Game plus the current state and strategy of every state variable.

    ``states`` maps a variable to a state index, ``strategies`` and ``modes``
    are keyed by ``(variable, agent)``.
    """

    __slots__ = ("game", "states", "strategies", "modes")

    def __init__(self, game: Tsg, states: Dict[str, int], strategies=None, modes=None):
        self.game = game
        self.states = dict(states)
        self.strategies = dict(strategies or {})
        self.modes = dict(modes or {})

    @classmethod
    def create(cls, game: Tsg, states: Dict[str, str], strategies=None) -> "EvalContext":
        """Build from state names; every strategy starts in its initial mode."""
        idx = {v: game.index[s] for v, s in states.items()}
        strategies = dict(strategies or {})
        modes = {(v, g): st.init[idx[v]] for (v, g), st in strategies.items()}
        return cls(game, idx, strategies, modes)

    def copy(self) -> "EvalContext":
        return EvalContext(self.game, self.states, self.strategies, self.modes)

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(sorted(self.states))

    def state_name(self, var: str) -> str:
        return self.game.states[self.states[var]]

    def with_state(self, var: str, s: int) -> "EvalContext":
        c = self.copy()
        c.states[var] = s
        return c

    def assign(self, names: Sequence[str], agents: Sequence[int], strat: StrategyAutomaton) -> "EvalContext":
        c = self.copy()
        for v in names:
            q = strat.init[c.states[v]]
            for g in agents:
                c.strategies[(v, g)] = strat
                c.modes[(v, g)] = q
        return c

    def position(self, names: Sequence[str]) -> tuple:
        """Composed-chain state of ``names``: ``((s, modes), ...)``."""
        ags = self.game.agents
        return tuple((self.states[v], tuple(self.modes.get((v, g), -1) for g in ags)) for v in names)

    def at(self, names: Sequence[str], pos: tuple) -> "EvalContext":
        c = self.copy()
        ags = self.game.agents
        for v, (s, modes) in zip(names, pos):
            c.states[v] = s
            for g, q in zip(ags, modes):
                if q >= 0:
                    c.modes[(v, g)] = q
        return c

    def __repr__(self):
        st = {v: self.state_name(v) for v in sorted(self.states)}
        return f"EvalContext({st})"


@dataclass
class CheckResult:
    verdict: bool
    witnesses: List[dict] = field(default_factory=list)
    stats: Dict[str, int] = field(default_factory=lambda: {"strategies_enumerated": 0, "lin_systems_solved": 0})

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witnesses": self.witnesses, "stats": dict(self.stats)}


class Checker:
    def __init__(self, game: Tsg, strategy_class="md", max_strategies: Optional[int] = None):
        self.game = game
        self.cls = StrategyClass.parse(strategy_class)
        self.max_strategies = max_strategies
        self.stats = {"strategies_enumerated": 0, "lin_systems_solved": 0}
        self._strats: Dict[frozenset, List[StrategyAutomaton]] = {}
        self._support: Dict[int, Tuple[str, ...]] = {}
        self._memo: Dict = {}
        self._step: Dict = {}
        self._keep = []  # nodes whose ids are used as memo keys

    # strategies -----------------------------------------------------------
    def strategies(self, agents) -> List[StrategyAutomaton]:
        key = frozenset(agents)
        got = self._strats.get(key)
        if got is None:
            if self.cls.memory == 1:
                it = enumerate_md_strategies(self.game, key)
            else:
                it = enumerate_kmem_det_strategies(self.game, key, self.cls.memory)
            got = []
            for st in it:
                got.append(st)
                if self.max_strategies is not None and len(got) > self.max_strategies:
                    raise StrategyLimitExceeded(
                        f"more than {self.max_strategies} strategies for agents {sorted(key)}")
            self._strats[key] = got
        return got

    # helpers --------------------------------------------------------------
    def support_of(self, node) -> Tuple[str, ...]:
        k = id(node)
        got = self._support.get(k)
        if got is None:
            got = tuple(sorted(support(node)))
            self._support[k] = got
            self._keep.append(node)
        return got

    def _slice(self, env: EvalContext, names) -> tuple:
        ags = self.game.agents
        out = []
        for v in names:
            out.append((env.states[v], tuple((env.strategies.get((v, g)), env.modes.get((v, g), -1)) for g in ags)))
        return tuple(out)

    def step_var(self, env: EvalContext, v: str, s: int, modes: tuple):
        """Successor distribution of one variable: ``[((s', modes'), p)]``."""
        game = self.game
        strats = tuple(env.strategies.get((v, g)) for g in game.agents)
        key = (strats, s, modes)
        got = self._step.get(key)
        if got is not None:
            return got
        owner = game.owner[s]
        st = strats[owner - 1]
        if st is None:
            raise ValueError(f"no strategy for agent {owner} on variable {v!r}")
        q = modes[owner - 1]
        nmodes = tuple(-1 if strats[i] is None or m < 0 else strats[i].mode_trans[m][s]
                       for i, m in enumerate(modes))
        acc: Dict[int, Fraction] = {}
        for a, pa in st.act[q][s]:
            for t, pt in game.succ[s][a]:
                acc[t] = acc.get(t, ZERO) + pa * pt
        got = [((t, nmodes), p) for t, p in acc.items()]
        self._step[key] = got
        return got

    def step(self, env: EvalContext, names, pos) -> List[Tuple[tuple, Fraction]]:
        parts = [self.step_var(env, v, s, m) for v, (s, m) in zip(names, pos)]
        out = []
        for combo in itertools.product(*parts):
            p = ONE
            for _, q in combo:
                p *= q
            out.append((tuple(c for c, _ in combo), p))
        return out

    # semantics ------------------------------------------------------------
    def holds(self, node, env: EvalContext) -> bool:
        if isinstance(node, TrueF):
            return True
        if isinstance(node, Atom):
            return node.prop in self.game.labels[env.states[node.var]]
        if isinstance(node, VarEq):
            return env.states[node.left] == env.states[node.right]
        if isinstance(node, Not):
            return not self.holds(node.body, env)
        if isinstance(node, And):
            return self.holds(node.left, env) and self.holds(node.right, env)
        if isinstance(node, StateQuant):
            return self._state_quant(node, env)
        key = (id(node), self._slice(env, self.support_of(node)))
        got = self._memo.get(key)
        if got is not None:
            return got
        if isinstance(node, ProbCompare):
            res = compare(node.op, self.value(node.left, env), self.value(node.right, env))
        elif isinstance(node, StratQuant):
            res = self._quant(node, env)
        else:
            raise TypeError(f"not a formula: {type(node).__name__}")
        self._memo[key] = res
        return res

    def _quant(self, node: StratQuant, env: EvalContext) -> bool:
        want = node.kind == "E"
        for st in self.strategies(node.agents):
            self.stats["strategies_enumerated"] += 1
            if self.holds(node.body, env.assign(node.vars, node.agents, st)) == want:
                return want
        return not want

    def _state_quant(self, node: StateQuant, env: EvalContext) -> bool:
        want = node.kind == "exists"
        for s in range(len(self.game.states)):
            if self.holds(node.body, env.with_state(node.var, s)) == want:
                return want
        return not want

    def value(self, node, env: EvalContext) -> Fraction:
        if isinstance(node, Const):
            return node.value
        if isinstance(node, Arith):
            vals = [self.value(o, env) for o in node.operands]
            acc = vals[0]
            for v in vals[1:]:
                if node.op == "+":
                    acc = acc + v
                elif node.op == "-":
                    acc = acc - v
                else:
                    acc = acc * v
            return acc
        if isinstance(node, ProbOf):
            key = (id(node), self._slice(env, self.support_of(node)))
            got = self._memo.get(key)
            if got is None:
                got = self._prob(node, env)
                self._memo[key] = got
            return got
        raise TypeError(f"not a probability expression: {type(node).__name__}")

    def _prob(self, node: ProbOf, env: EvalContext) -> Fraction:
        names = self.support_of(node)
        start = env.position(names)
        path = node.path
        if isinstance(path, Next):
            total = ZERO
            for pos, p in self.step(env, names, start):
                if self.holds(path.body, env.at(names, pos)):
                    total += p
            return total
        if isinstance(path, Until):
            return self._until(path, env, names, start)
        raise TypeError("path formula must be desugared")

    def _until(self, path: Until, env: EvalContext, names, start) -> Fraction:
        sat1, sat2 = set(), set()
        trans = {}
        stack = [start]
        seen = {start}
        while stack:
            pos = stack.pop()
            here = env.at(names, pos)
            if self.holds(path.right, here):
                sat2.add(pos)
                trans[pos] = {pos: ONE}
                continue
            if not self.holds(path.left, here):
                trans[pos] = {pos: ONE}
                continue
            sat1.add(pos)
            row: Dict = {}
            for nxt, p in self.step(env, names, pos):
                row[nxt] = row.get(nxt, ZERO) + p
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
            trans[pos] = row
        if start in sat2:
            return ONE
        if start not in sat1:
            return ZERO
        vals, solved = until_values(trans, sat1, sat2)
        self.stats["lin_systems_solved"] += solved
        return vals[start]

    # top level ------------------------------------------------------------
    def run(self, formula, env: Optional[EvalContext] = None) -> CheckResult:
        env = env or EvalContext(self.game, {})
        witnesses: List[dict] = []
        verdict = self._witness_eval(formula, env, witnesses, True)
        if not verdict:
            witnesses = []
        return CheckResult(verdict, witnesses, dict(self.stats))

    def _witness_eval(self, node, env, out, record) -> bool:
        if record and isinstance(node, StateQuant) and node.kind == "exists":
            for s in range(len(self.game.states)):
                mark = len(out)
                out.append({"kind": "state", "var": node.var, "state": self.game.states[s]})
                if self._witness_eval(node.body, env.with_state(node.var, s), out, True):
                    return True
                del out[mark:]
            return False
        if record and isinstance(node, StratQuant) and node.kind == "E":
            for st in self.strategies(node.agents):
                self.stats["strategies_enumerated"] += 1
                mark = len(out)
                out.append({"kind": "strategy", "agents": list(node.agents), "vars": list(node.vars),
                            "strategy": st.describe()})
                if self._witness_eval(node.body, env.assign(node.vars, node.agents, st), out, True):
                    return True
                del out[mark:]
            return False
        return self.holds(node, env)


def _worker(args):
    game, formula, cls, max_strategies, var, s = args
    ck = Checker(game, cls, max_strategies)
    env = EvalContext(game, {var: s})
    res = ck.run(formula, env)
    return res.verdict, res.witnesses, res.stats


def check(game: Tsg, formula, strategy_class="md", jobs: int = 1,
          max_strategies: Optional[int] = None) -> CheckResult:
    """Decide ``game |= formula`` over the given strategy class."""
    f = desugar(formula)
    require_well_formed(f, game.num_agents, strict=False)
    cls = StrategyClass.parse(strategy_class)
    if jobs <= 1 or not isinstance(f, StateQuant):
        return Checker(game, cls, max_strategies).run(f)
    tasks = [(game, f.body, cls, max_strategies, f.var, s) for s in range(len(game.states))]
    stats = {"strategies_enumerated": 0, "lin_systems_solved": 0}
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        results = list(ex.map(_worker, tasks))
    for _, _, st in results:
        for k in stats:
            stats[k] += st[k]
    if f.kind == "exists":
        for s, (v, w, _) in enumerate(results):
            if v:
                return CheckResult(True, [{"kind": "state", "var": f.var, "state": game.states[s]}] + w, stats)
        return CheckResult(False, [], stats)
    return CheckResult(all(v for v, _, _ in results), [], stats)


def holds(ctx: EvalContext, formula, strategy_class="md") -> bool:
    return Checker(ctx.game, strategy_class).holds(desugar(formula), ctx)


def eval_prob_expr(ctx: EvalContext, expr, strategy_class="md") -> Fraction:
    return Checker(ctx.game, strategy_class).value(desugar(expr), ctx)


def successors(ctx: EvalContext) -> List[Tuple[EvalContext, Fraction]]:
    """One step of the composed chain over all variables of ``ctx``."""
    ck = Checker(ctx.game)
    names = ctx.variables
    return [(ctx.at(names, pos), p) for pos, p in ck.step(ctx, names, ctx.position(names))]


def shift_context(ctx: EvalContext, prefix: Sequence[tuple]) -> EvalContext:
    """Context reached after following ``prefix`` (composed-chain positions
    over ``ctx.variables``, starting with the current one)."""
    names = ctx.variables
    if not prefix or tuple(prefix[0]) != ctx.position(names):
        raise PrefixMismatch("prefix does not start at the current position")
    ck = Checker(ctx.game)
    cur = ctx
    for a, b in zip(prefix, prefix[1:]):
        nxt = dict(ck.step(cur, names, tuple(a)))
        if nxt.get(tuple(b), ZERO) == 0:
            raise PrefixMismatch(f"no transition from {a} to {b}")
        cur = cur.at(names, tuple(b))
    return cur


def composed_chain(ctx: EvalContext, names: Optional[Sequence[str]] = None):
    """Reachable part of the composed chain from the current position."""
    from .game import Dtmc
    ck = Checker(ctx.game)
    names = tuple(names) if names is not None else ctx.variables
    start = ctx.position(names)
    trans, labels = {}, {}
    stack, seen = [start], {start}
    while stack:
        pos = stack.pop()
        row = {}
        for nxt, p in ck.step(ctx, names, pos):
            row[nxt] = row.get(nxt, ZERO) + p
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
        trans[pos] = row
        labels[pos] = frozenset(f"{a}_{i + 1}" for i, (s, _) in enumerate(pos) for a in ctx.game.labels[s])
    return Dtmc(sorted(trans), trans, labels), start


check_nonquant = holds
