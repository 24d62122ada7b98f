from fractions import Fraction

import numpy as np
import pytest

from hypergame import StrategyAutomaton, _kernels, enumerate_md_strategies, induce_dtmc, make_game
from hypergame.checker import EvalContext
from hypergame.formula.ast import Atom, Finally, Next, Until, TrueF
from hypergame.linalg import until_probability
from hypergame.oracles import (NeQuery, NonPositiveSamples, hoeffding_half_width, monte_carlo_prob, nash_oracle,
                               nash_report, path_values, swsp_ne_oracle, value_iteration_until)
from hypergame.translate.patl import embed_path

from gamesets import game_set

HALF = Fraction(1, 2)


def _ctx(g, start, var="x"):
    joint = next(iter(enumerate_md_strategies(g, g.agents)))
    return EvalContext.create(g, {var: start}, {(var, a): joint for a in g.agents})


def _loop_half():
    return {0: {0: HALF, 1: HALF}, 1: {1: Fraction(1)}}


# value iteration --------------------------------------------------------------

def test_vi_zero_iterations():
    t = _loop_half()
    assert value_iteration_until(t, {0}, {1}, 0, 0) == 0
    assert value_iteration_until(t, {0}, {1}, 1, 0) == 1


def test_vi_coin_one_step(coin):
    chain = induce_dtmc(coin, next(enumerate_md_strategies(coin, {1})))
    sat2 = {("t", 0)}
    assert value_iteration_until(chain, set(chain.states), sat2, ("s", 0), 1) == HALF


@pytest.mark.parametrize("n", [1, 2, 5, 17])
def test_vi_geometric(n):
    assert value_iteration_until(_loop_half(), {0}, {1}, 0, n) == 1 - HALF ** n


def test_vi_negative_rejected():
    with pytest.raises(ValueError):
        value_iteration_until(_loop_half(), {0}, {1}, 0, -1)


def test_vi_bounded_by_exact_on_game_set():
    for g in game_set():
        for joint in enumerate_md_strategies(g, g.agents):
            chain = induce_dtmc(g, joint)
            sat2 = {s for s in chain.states if "t2" in chain.labels[s]}
            for start in chain.states:
                exact = until_probability(chain, set(chain.states), sat2, start)
                prev = Fraction(0)
                for n in range(12):
                    v = value_iteration_until(chain, set(chain.states), sat2, start, n)
                    assert prev <= v <= exact
                    prev = v


# Monte Carlo --------------------------------------------------------------------

def test_mc_deterministic_next_is_exact():
    g = make_game(1, [("s", 1, ()), ("goal", 1, {"goal"})], [("s", "a", "goal", 1), ("goal", "a", "goal", 1)])
    res = monte_carlo_prob(_ctx(g, "s"), Next(Atom("goal", "x")), samples=1000, seed=3)
    assert res.estimate == 1.0


def test_mc_coin_horizon_one(coin):
    res = monte_carlo_prob(_ctx(coin, "s"), Finally(Atom("goal", "x")), samples=100_000, seed=11, horizon=1)
    assert abs(res.estimate - 0.5) <= res.half_width
    assert res.half_width == pytest.approx(hoeffding_half_width(100_000, 1e-3))
    assert res.seed == 11 and res.samples == 100_000 and not res.truncated


def test_mc_seed_reproducible_and_jobs_independent(coin):
    ctx = _ctx(coin, "s")
    path = Finally(Atom("goal", "x"))
    a = monte_carlo_prob(ctx, path, samples=20_000, seed=5)
    b = monte_carlo_prob(ctx, path, samples=20_000, seed=5)
    c = monte_carlo_prob(ctx, path, samples=20_000, seed=5, jobs=3)
    assert a.estimate == b.estimate == c.estimate


def test_mc_backends_agree(coin):
    ctx = _ctx(coin, "s")
    path = Until(TrueF(), Atom("goal", "x"))
    a = monte_carlo_prob(ctx, path, samples=20_000, seed=9, backend="numpy")
    b = monte_carlo_prob(ctx, path, samples=20_000, seed=9, backend="numba" if _kernels.HAVE_NUMBA else "numpy")
    assert a.estimate == b.estimate


def test_kernel_backends_identical_counts():
    cdf = np.array([[0.5, 1.0], [1.0, 2.0], [1.0, 2.0]])
    succ = np.array([[1, 2], [1, 0], [2, 0]], dtype=np.int64)
    status = np.array([0, 1, 2], dtype=np.int8)
    u = np.random.default_rng(0).random((500, 4))
    assert _kernels.sample_paths(cdf, succ, status, 0, u, "numpy") == \
        _kernels.sample_paths(cdf, succ, status, 0, u, "numba" if _kernels.HAVE_NUMBA else "numpy")


def test_mc_truncation_flag():
    # a fair random walk that may wander for long: horizon 2 cannot decide everything
    g = make_game(1, [("a", 1, ()), ("b", 1, ()), ("goal", 1, {"goal"})],
                  [("a", "x", "b", HALF), ("a", "x", "a", HALF), ("b", "x", "goal", HALF), ("b", "x", "a", HALF),
                   ("goal", "x", "goal", 1)])
    res = monte_carlo_prob(_ctx(g, "a"), Finally(Atom("goal", "x")), samples=2000, seed=1, horizon=2)
    assert res.truncated and res.unresolved > 0
    assert res.estimate <= 1.0


def test_mc_nonpositive(coin):
    with pytest.raises(NonPositiveSamples):
        monte_carlo_prob(_ctx(coin, "s"), Finally(Atom("goal", "x")), samples=0)


# Nash oracles --------------------------------------------------------------------

def _obj():
    return (embed_path("F t1", "x", 2), embed_path("F t2", "x", 2))


def test_single_agent_always_has_ne(gpq):
    q = NeQuery(gpq, "s0", (1,), (Finally(Atom("q", "x")), Finally(Atom("p", "x"))))
    assert nash_oracle(q)


def test_large_epsilon_always_ne():
    for g in game_set():
        assert nash_oracle(NeQuery(g, "s0", (1,), _obj(), epsilon=1))


def test_swsp_large_epsilon_true():
    for g in game_set():
        assert swsp_ne_oracle(NeQuery(g, "s0", (1,), _obj(), 1, ">=", 0))


def test_swsp_unsatisfiable_welfare():
    for g in game_set():
        assert not swsp_ne_oracle(NeQuery(g, "s0", (1,), _obj(), 1, ">=", 3))


def test_grand_coalition_is_argmax():
    for g in game_set():
        q = NeQuery(g, "s0", (1, 2), _obj())
        s = g.index["s0"]
        best = max(path_values(g, j, q.objectives[0])[s] for j in enumerate_md_strategies(g, g.agents))
        rep = nash_report(q)
        assert rep["verdict"] and rep["class"] == "MD"
        choices = {st: next(iter(acts)) for st, acts in rep["witness"]["coalition"]["act"]["0"].items()}
        w = StrategyAutomaton.from_choices(g, g.agents, choices)
        assert path_values(g, w, q.objectives[0])[s] == best


def test_query_validation(gpq):
    with pytest.raises(ValueError):
        NeQuery(gpq, "s0", (2,), (Finally(Atom("q", "x")),) * 2)
    with pytest.raises(ValueError):
        NeQuery(gpq, "s0", (1,), (Finally(Atom("q", "x")),) * 2, epsilon=-1)
    with pytest.raises(ValueError):
        NeQuery(gpq, "nowhere", (1,), (Finally(Atom("q", "x")),) * 2)
