"""Direct equilibrium checks by enumerating memoryless deterministic strategies.

Both the candidate joint strategy and every deviation range over MD
strategies only, the class the checker uses for comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from ..formula.ast import (And, Atom, Finally, Globally, Implies, Next, Not, Or, TrueF, Until, VarEq,
                           compare)
from ..game import Tsg, enumerate_md_strategies, induce_dtmc, update_strategy
from ..linalg import until_values

STRATEGY_CLASS = "MD"


@dataclass
class NeQuery:
    game: Tsg
    start: str
    coalition: Tuple[int, ...]
    objectives: Tuple[object, object]  # path formulas for C and for the complement
    epsilon: Fraction = Fraction(0)
    relation: str = ">="
    bound: Fraction = Fraction(0)

    def __post_init__(self):
        self.coalition = tuple(sorted(set(self.coalition)))
        if not set(self.coalition) <= set(self.game.agents):
            raise ValueError("coalition must be a subset of the agents")
        self.epsilon = Fraction(self.epsilon)
        self.bound = Fraction(self.bound)
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.start not in self.game.index:
            raise ValueError(f"unknown start state {self.start!r}")

    @property
    def complement(self) -> Tuple[int, ...]:
        return tuple(a for a in self.game.agents if a not in self.coalition)


def _state_holds(f, labels) -> bool:
    if isinstance(f, TrueF):
        return True
    if isinstance(f, Atom):
        return f.prop in labels
    if isinstance(f, Not):
        return not _state_holds(f.body, labels)
    if isinstance(f, And):
        return _state_holds(f.left, labels) and _state_holds(f.right, labels)
    if isinstance(f, Or):
        return _state_holds(f.left, labels) or _state_holds(f.right, labels)
    if isinstance(f, Implies):
        return (not _state_holds(f.left, labels)) or _state_holds(f.right, labels)
    if isinstance(f, VarEq):
        return True  # single experiment: both sides denote the same state
    raise ValueError(f"objective must be probability-free, found {type(f).__name__}")


def path_values(game: Tsg, joint, path) -> List[Fraction]:
    """Probability of ``path`` from every game state under the joint strategy."""
    chain = induce_dtmc(game, joint)
    sat = lambda f: {s for s in chain.states if _state_holds(f, chain.labels[s])}  # noqa: E731
    if isinstance(path, Next):
        good = sat(path.body)
        vals = {s: sum((p for t, p in chain.trans[s].items() if t in good), Fraction(0)) for s in chain.states}
    elif isinstance(path, (Until, Finally)):
        left = TrueF() if isinstance(path, Finally) else path.left
        right = path.body if isinstance(path, Finally) else path.right
        vals, _ = until_values(chain.trans, sat(left), sat(right))
    elif isinstance(path, Globally):
        bad, _ = until_values(chain.trans, set(chain.states), sat(Not(path.body)))
        vals = {s: 1 - v for s, v in bad.items()}
    else:
        raise ValueError(f"not a path formula: {type(path).__name__}")
    return [vals[(s, 0)] for s in game.states]


@dataclass
class _Table:
    c_strats: list
    d_strats: list
    v1: Dict[Tuple[int, int], List[Fraction]] = field(default_factory=dict)
    v2: Dict[Tuple[int, int], List[Fraction]] = field(default_factory=dict)


def _table(q: NeQuery) -> _Table:
    game = q.game
    cs = list(enumerate_md_strategies(game, q.coalition))
    ds = list(enumerate_md_strategies(game, q.complement))
    tab = _Table(cs, ds)
    for i, c in enumerate(cs):
        for j, d in enumerate(ds):
            joint = update_strategy(d, c)
            tab.v1[(i, j)] = path_values(game, joint, q.objectives[0])
            tab.v2[(i, j)] = path_values(game, joint, q.objectives[1])
    return tab


def _is_ne(tab: _Table, i: int, j: int, s: int, eps: Fraction) -> bool:
    p1 = tab.v1[(i, j)][s]
    if any(p1 < tab.v1[(k, j)][s] - eps for k in range(len(tab.c_strats))):
        return False
    p2 = tab.v2[(i, j)][s]
    return not any(p2 < tab.v2[(i, k)][s] - eps for k in range(len(tab.d_strats)))


def nash_report(q: NeQuery) -> dict:
    tab = _table(q)
    s = q.game.index[q.start]
    for i in range(len(tab.c_strats)):
        for j in range(len(tab.d_strats)):
            if _is_ne(tab, i, j, s, q.epsilon):
                return {"verdict": True, "class": STRATEGY_CLASS, "witness": _witness(tab, i, j)}
    return {"verdict": False, "class": STRATEGY_CLASS, "witness": None}


def nash_oracle(q: NeQuery) -> bool:
    """Some MD joint strategy is an ε-NE at ``q.start`` against MD deviations."""
    return nash_report(q)["verdict"]


def swsp_report(q: NeQuery) -> dict:
    tab = _table(q)
    game = q.game
    s = game.index[q.start]
    everywhere = range(len(game.states))
    sp = [(i, j) for i in range(len(tab.c_strats)) for j in range(len(tab.d_strats))
          if all(_is_ne(tab, i, j, t, q.epsilon) for t in everywhere)]
    welfare = {ij: tab.v1[ij][s] + tab.v2[ij][s] for ij in sp}
    for ij in sp:
        w = welfare[ij]
        if compare(q.relation, w, q.bound) and all(w >= welfare[o] for o in sp):
            return {"verdict": True, "class": STRATEGY_CLASS, "witness": _witness(tab, *ij),
                    "welfare": str(w), "sp_equilibria": len(sp)}
    return {"verdict": False, "class": STRATEGY_CLASS, "witness": None, "sp_equilibria": len(sp)}


def swsp_ne_oracle(q: NeQuery) -> bool:
    """Social-welfare subgame-perfect ε-NE existence over MD strategies."""
    return swsp_report(q)["verdict"]


def _witness(tab: _Table, i: int, j: int) -> dict:
    return {"coalition": tab.c_strats[i].describe(), "complement": tab.d_strats[j].describe()}
