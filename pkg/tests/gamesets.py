"""Fixed game collections shared by the cross-check tests.

The set was fixed before any verdicts were compared: seeds 0..5 of the
generator below, no filtering.
"""
import random
from fractions import Fraction

from hypergame import make_game

HALF = Fraction(1, 2)
ONE = Fraction(1)

GAME_SEEDS = tuple(range(6))


def random_two_agent_game(seed: int, n_states=None):
    """Two agents, at most 4 states and 2 actions per state; s0 is init."""
    rng = random.Random(seed)
    n = n_states or rng.choice([3, 4])
    names = [f"s{i}" for i in range(n)]
    states, trans = [], []
    for i, s in enumerate(names):
        labels = set()
        if i == 0:
            labels.add("init")
        if i > 0 and rng.random() < 0.4:
            labels.add("t1")
        if i > 0 and rng.random() < 0.4:
            labels.add("t2")
        states.append((s, 1 + (i % 2 if i < 2 else rng.randrange(2)), labels))
        for a in ["a", "b"][: rng.choice([1, 2, 2])]:
            if rng.random() < 0.5:
                trans.append((s, a, rng.choice(names), ONE))
            else:
                t1, t2 = rng.sample(names, 2)
                trans.append((s, a, t1, HALF))
                trans.append((s, a, t2, HALF))
    return make_game(2, states, trans)


def game_set():
    return [random_two_agent_game(s) for s in GAME_SEEDS]


NASH_FORMULA = ("forall x. forall y. (init(x) & init(y)) -> E{1,2}[x, y] "
            "((A{1}[y] P(F t1(x)) >= P(F t1(y))) & (A{2}[y] P(F t2(x)) >= P(F t2(y))))")
