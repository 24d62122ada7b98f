"""Turn-based stochastic games, strategy automata and their induced chains.

All probabilities are exact ``Fraction`` values.  States and actions are
identified by name; internally a game orders its states by name and most
hot paths work on the resulting integer indices.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple


class ModelError(ValueError):
    """Base class for malformed game descriptions."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyEnabledSet(ModelError):
    pass


class PartialAction(ModelError):
    pass


class BadProbability(ModelError):
    pass


class UnknownAgent(ModelError):
    pass


class DuplicateState(ModelError):
    pass


class UnknownState(ModelError):
    pass


class DuplicateTransition(ModelError):
    pass


class NotSubset(ValueError):
    pass


class GameMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# raw descriptions and validation


@dataclass
class RawState:
    name: str
    agent: int
    labels: Tuple[str, ...] = ()
    line: Optional[int] = None


@dataclass
class RawTransition:
    source: str
    action: str
    target: str
    prob: Fraction
    line: Optional[int] = None


@dataclass
class RawModel:
    agents: int
    states: List[RawState] = field(default_factory=list)
    transitions: List[RawTransition] = field(default_factory=list)


def _as_fraction(p, line=None) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, float):
        raise BadProbability(f"float probability {p!r}; use a rational", line)
    try:
        return Fraction(p)
    except (ValueError, ZeroDivisionError, TypeError):
        raise BadProbability(f"cannot read probability {p!r}", line) from None


def validate_tsg(raw: RawModel) -> "Tsg":
    """Check a raw description and build a ``Tsg``.

    Raises the specific ``ModelError`` subclass for the first problem found.
    """
    if not isinstance(raw.agents, int) or raw.agents < 1:
        raise UnknownAgent(f"agent count must be a positive integer, got {raw.agents!r}")
    owners: Dict[str, int] = {}
    labels: Dict[str, frozenset] = {}
    decl_line: Dict[str, Optional[int]] = {}
    for st in raw.states:
        if st.name in owners:
            raise DuplicateState(f"state {st.name!r} declared twice", st.line)
        if not (1 <= st.agent <= raw.agents):
            raise UnknownAgent(f"state {st.name!r} owned by unknown agent {st.agent}", st.line)
        owners[st.name] = st.agent
        labels[st.name] = frozenset(st.labels)
        decl_line[st.name] = st.line
    if not owners:
        raise ModelError("game has no states")

    trans: Dict[Tuple[str, str], Dict[str, Fraction]] = {}
    first_line: Dict[Tuple[str, str], Optional[int]] = {}
    for tr in raw.transitions:
        for name in (tr.source, tr.target):
            if name not in owners:
                raise UnknownState(f"unknown state {name!r}", tr.line)
        p = _as_fraction(tr.prob, tr.line)
        if p < 0 or p > 1:
            raise BadProbability(f"probability {p} outside [0, 1]", tr.line)
        row = trans.setdefault((tr.source, tr.action), {})
        first_line.setdefault((tr.source, tr.action), tr.line)
        if tr.target in row:
            raise DuplicateTransition(
                f"transition {tr.source} {tr.action} {tr.target} given twice", tr.line)
        row[tr.target] = p

    enabled: Dict[str, List[str]] = {s: [] for s in owners}
    for (s, a), row in trans.items():
        total = sum(row.values(), Fraction(0))
        if total == 1:
            enabled[s].append(a)
        elif total > 1:
            raise BadProbability(f"action {a} at {s} sums to {total} > 1", first_line[(s, a)])
        elif total != 0:
            raise PartialAction(f"action {a} at {s} sums to {total}", first_line[(s, a)])
    for s, acts in enabled.items():
        if not acts:
            raise EmptyEnabledSet(f"state {s!r} has no enabled action", decl_line[s])

    return Tsg(raw.agents, owners, labels, trans, enabled)


def make_game(agents: int, states: Iterable[Sequence], transitions: Iterable[Sequence]) -> "Tsg":
    """Convenience constructor: ``states`` are ``(name, agent, labels)``,
    ``transitions`` are ``(source, action, target, prob)``."""
    raw = RawModel(agents)
    for name, agent, labs in states:
        raw.states.append(RawState(name, agent, tuple(labs)))
    for s, a, t, p in transitions:
        raw.transitions.append(RawTransition(s, a, t, _as_fraction(p)))
    return validate_tsg(raw)


# ---------------------------------------------------------------------------
# the game


class Tsg:
    """A validated turn-based stochastic game.

    ``states`` is sorted by name and defines the index of every state.
    ``succ[i][a]`` lists ``(j, p)`` with ``p > 0`` for enabled ``a``.
    """

    def __init__(self, agents, owners, labels, trans, enabled):
        self.agents: Tuple[int, ...] = tuple(range(1, agents + 1))
        self.states: Tuple[str, ...] = tuple(sorted(owners))
        self.index: Dict[str, int] = {s: i for i, s in enumerate(self.states)}
        self.owner: Tuple[int, ...] = tuple(owners[s] for s in self.states)
        self.labels: Tuple[frozenset, ...] = tuple(labels[s] for s in self.states)
        self.enabled: Tuple[Tuple[str, ...], ...] = tuple(tuple(sorted(enabled[s])) for s in self.states)
        self.actions: Tuple[str, ...] = tuple(sorted({a for (_, a) in trans}))
        succ = []
        for s in self.states:
            rows = {}
            for a in sorted(enabled[s]):
                row = trans[(s, a)]
                rows[a] = tuple((self.index[t], p) for t, p in sorted(row.items(), key=lambda kv: self.index[kv[0]]) if p > 0)
            succ.append(rows)
        self.succ: Tuple[Dict[str, Tuple[Tuple[int, Fraction], ...]], ...] = tuple(succ)
        self.atomic_props = frozenset().union(*self.labels)
        self._key = (self.agents, self.states, self.owner, self.labels,
                     tuple(tuple(sorted(r.items())) for r in self.succ))
        self._hash = hash(self._key)

    @property
    def num_agents(self) -> int:
        return len(self.agents)

    def __eq__(self, other):
        return isinstance(other, Tsg) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Tsg(agents={self.num_agents}, states={len(self.states)})"

    def trans(self, s: str, a: str, t: str) -> Fraction:
        """Transition probability by names; zero for disabled actions."""
        i = self.index[s]
        for j, p in self.succ[i].get(a, ()):
            if j == self.index[t]:
                return p
        return Fraction(0)

    def states_of(self, agents: Iterable[int]) -> Tuple[int, ...]:
        ags = set(agents)
        return tuple(i for i, g in enumerate(self.owner) if g in ags)

    def state_with_label(self, label: str) -> List[str]:
        return [s for s, labs in zip(self.states, self.labels) if label in labs]


# ---------------------------------------------------------------------------
# strategies


Dist = Tuple[Tuple[str, Fraction], ...]


class StrategyAutomaton:
    """Finite-memory strategy for a set of agents.

    Modes are ``0 .. n_modes-1``.  ``init[s]`` and ``mode_trans[q][s]`` are
    mode indices; ``act[q]`` maps a state index owned by ``agents`` to a
    distribution over its enabled actions (zero entries omitted).
    """

    __slots__ = ("game", "agents", "n_modes", "init", "mode_trans", "act", "_key", "_hash")

    def __init__(self, game: Tsg, agents: Iterable[int], n_modes: int, init, mode_trans, act):
        self.game = game
        self.agents = frozenset(agents)
        self.n_modes = n_modes
        self.init = tuple(init)
        self.mode_trans = tuple(tuple(r) for r in mode_trans)
        self.act = tuple(dict(r) for r in act)
        self._key = (tuple(sorted(self.agents)), n_modes, self.init, self.mode_trans,
                     tuple(tuple(sorted(r.items())) for r in self.act))
        self._hash = hash(self._key)

    @classmethod
    def memoryless(cls, game: Tsg, agents, choice: Dict[int, Dist]) -> "StrategyAutomaton":
        n = len(game.states)
        return cls(game, agents, 1, [0] * n, [[0] * n], [choice])

    @classmethod
    def from_choices(cls, game: Tsg, agents, choices: Dict[str, str]) -> "StrategyAutomaton":
        """Deterministic memoryless strategy from ``{state name: action}``."""
        one = Fraction(1)
        ags = frozenset(agents)
        act = {}
        for i in game.states_of(ags):
            a = choices.get(game.states[i], game.enabled[i][0])
            if a not in game.enabled[i]:
                raise ValueError(f"action {a!r} not enabled at {game.states[i]!r}")
            act[i] = ((a, one),)
        return cls.memoryless(game, ags, act)

    def __eq__(self, other):
        return isinstance(other, StrategyAutomaton) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"StrategyAutomaton(agents={sorted(self.agents)}, modes={self.n_modes})"

    @property
    def deterministic(self) -> bool:
        return all(len(d) == 1 for row in self.act for d in row.values())

    def dist(self, q: int, s: int) -> Dist:
        return self.act[q][s]

    def prob(self, q: int, s: int, a: str) -> Fraction:
        for b, p in self.act[q].get(s, ()):
            if b == a:
                return p
        return Fraction(0)

    def describe(self) -> dict:
        """JSON friendly description using state and action names."""
        g = self.game
        act = {}
        for q, row in enumerate(self.act):
            act[str(q)] = {g.states[s]: {a: str(p) for a, p in d} for s, d in sorted(row.items())}
        out = {"agents": sorted(self.agents), "modes": self.n_modes, "act": act}
        if self.n_modes > 1:
            out["init"] = {g.states[s]: q for s, q in enumerate(self.init)}
            out["mode"] = {str(q): {g.states[s]: r for s, r in enumerate(row)}
                           for q, row in enumerate(self.mode_trans)}
        return out


def restrict_strategy(strat: StrategyAutomaton, agents: Iterable[int]) -> StrategyAutomaton:
    """Same modes, ``act`` only on the states owned by ``agents``."""
    ags = frozenset(agents)
    if not ags <= strat.agents:
        raise NotSubset(f"cannot restrict to {sorted(ags)}: strategy covers {sorted(strat.agents)}")
    owner = strat.game.owner
    act = [{s: d for s, d in row.items() if owner[s] in ags} for row in strat.act]
    return StrategyAutomaton(strat.game, ags, strat.n_modes, strat.init, strat.mode_trans, act)


def update_strategy(alpha: StrategyAutomaton, beta: StrategyAutomaton) -> StrategyAutomaton:
    """Product automaton following ``beta`` on its states and ``alpha`` elsewhere.

    Mode ``(qa, qb)`` is stored as ``qa * beta.n_modes + qb``.
    """
    if alpha.game != beta.game:
        raise GameMismatch("strategies belong to different games")
    g = alpha.game
    n = len(g.states)
    mb = beta.n_modes
    owner = g.owner
    agents = alpha.agents | beta.agents
    init = [alpha.init[s] * mb + beta.init[s] for s in range(n)]
    mode_trans = []
    act = []
    for qa in range(alpha.n_modes):
        for qb in range(mb):
            mode_trans.append([alpha.mode_trans[qa][s] * mb + beta.mode_trans[qb][s] for s in range(n)])
            row = {}
            for s in range(n):
                if owner[s] in beta.agents:
                    if s in beta.act[qb]:
                        row[s] = beta.act[qb][s]
                elif owner[s] in alpha.agents and s in alpha.act[qa]:
                    row[s] = alpha.act[qa][s]
            act.append(row)
    return StrategyAutomaton(g, agents, alpha.n_modes * mb, init, mode_trans, act)


def _canonical_structure(init, mode_trans, n_states):
    """Reachable modes in first-visit order, or ``None`` if some mode is unreachable
    or the labelling is not already canonical."""
    order = {}
    queue = deque()
    for s in range(n_states):
        q = init[s]
        if q not in order:
            order[q] = len(order)
            queue.append(q)
    while queue:
        q = queue.popleft()
        for s in range(n_states):
            r = mode_trans[q][s]
            if r not in order:
                order[r] = len(order)
                queue.append(r)
    return order


def canonicalize(strat: StrategyAutomaton) -> StrategyAutomaton:
    """Drop unreachable modes and rename the rest in first-visit order."""
    n = len(strat.game.states)
    order = _canonical_structure(strat.init, strat.mode_trans, n)
    inv = sorted(order, key=order.get)
    init = [order[q] for q in strat.init]
    mode_trans = [[order[strat.mode_trans[q][s]] for s in range(n)] for q in inv]
    act = [strat.act[q] for q in inv]
    return StrategyAutomaton(strat.game, strat.agents, len(inv), init, mode_trans, act)


def _md_choices(game: Tsg, agents) -> Tuple[Tuple[int, ...], List[Tuple[str, ...]]]:
    owned = game.states_of(agents)
    return owned, [game.enabled[s] for s in owned]


def enumerate_md_strategies(game: Tsg, agents: Iterable[int]) -> Iterator[StrategyAutomaton]:
    """All deterministic memoryless strategies, lexicographic over
    (states sorted by name, actions sorted by name)."""
    ags = frozenset(agents)
    owned, options = _md_choices(game, ags)
    one = Fraction(1)
    for combo in itertools.product(*options):
        yield StrategyAutomaton.memoryless(game, ags, {s: ((a, one),) for s, a in zip(owned, combo)})


def enumerate_kmem_det_strategies(game: Tsg, agents: Iterable[int], k: int) -> Iterator[StrategyAutomaton]:
    """Deterministic strategies with at most ``k`` modes, each canonical form once.

    ``k == 1`` yields exactly the memoryless enumeration.
    """
    if k < 1:
        raise ValueError("memory bound must be at least 1")
    ags = frozenset(agents)
    owned, options = _md_choices(game, ags)
    one = Fraction(1)
    n = len(game.states)
    for m in range(1, k + 1):
        for init in itertools.product(range(m), repeat=n):
            for flat in itertools.product(range(m), repeat=m * n):
                mode_trans = [flat[q * n:(q + 1) * n] for q in range(m)]
                order = _canonical_structure(init, mode_trans, n)
                if len(order) != m or any(order[q] != q for q in order):
                    continue
                for combos in itertools.product(itertools.product(*options), repeat=m):
                    act = [{s: ((a, one),) for s, a in zip(owned, combo)} for combo in combos]
                    yield StrategyAutomaton(game, ags, m, init, mode_trans, act)


# ---------------------------------------------------------------------------
# Markov chains


class Dtmc:
    """Finite DTMC over hashable states with exact rows."""

    def __init__(self, states, trans: Dict, labels: Dict):
        self.states = tuple(states)
        self.trans = {s: dict(trans[s]) for s in self.states}
        self.labels = {s: frozenset(labels.get(s, ())) for s in self.states}

    @property
    def atomic_props(self) -> frozenset:
        return frozenset().union(*self.labels.values()) if self.labels else frozenset()

    def row_sums_ok(self) -> bool:
        return all(sum(r.values(), Fraction(0)) == 1 for r in self.trans.values())

    def __repr__(self):
        return f"Dtmc(states={len(self.states)})"


def induce_dtmc(game: Tsg, strat: StrategyAutomaton) -> Dtmc:
    """Chain over ``S x Q``; the mode update reads the departing state."""
    if strat.game != game:
        raise GameMismatch("strategy belongs to a different game")
    missing = [game.states[s] for s in range(len(game.states))
               if any(s not in row for row in strat.act)]
    if missing:
        raise ValueError(f"strategy undefined at {missing[:3]}")
    trans = {}
    labels = {}
    states = []
    for s in range(len(game.states)):
        for q in range(strat.n_modes):
            node = (game.states[s], q)
            states.append(node)
            labels[node] = game.labels[s]
            q2 = strat.mode_trans[q][s]
            row: Dict = {}
            for a, pa in strat.act[q][s]:
                for t, pt in game.succ[s][a]:
                    key = (game.states[t], q2)
                    row[key] = row.get(key, Fraction(0)) + pa * pt
            trans[node] = row
    return Dtmc(states, trans, labels)


def compose_dtmcs(chains: Sequence[Dtmc]) -> Dtmc:
    """Synchronous product; label ``p`` of component ``i`` becomes ``p_i`` (1-based)."""
    states = list(itertools.product(*(c.states for c in chains)))
    trans = {}
    labels = {}
    for st in states:
        row = {(): Fraction(1)}
        for c, s in zip(chains, st):
            nxt = {}
            for prefix, p in row.items():
                for t, q in c.trans[s].items():
                    nxt[prefix + (t,)] = p * q
            row = nxt
        trans[st] = row
        labels[st] = frozenset(f"{p}_{i + 1}" for i, (c, s) in enumerate(zip(chains, st)) for p in c.labels[s])
    return Dtmc(states, trans, labels)
