from fractions import Fraction

import pytest

from hypergame.formula import parse_formula
from hypergame.smt import (SexprError, SmtScript, SolverNotFound, UnparseableOutput, dumps, emit_smtlib, encode,
                           loads, loads_all, parse_smtlib, parse_status, solve_external)
from hypergame.smt.solver import SolverStatus

from conftest import solver_command

GPQ_NEXT = "forall x. E{1}[x] P(X q(x)) = 1"
NEEDS_MEMORY = "exists x. E{1}[x] P(X (p(x) & P(X q(x)) = 1)) = 1"


def _walk(t):
    yield t
    if isinstance(t, tuple):
        for c in t:
            yield from _walk(c)


def test_gpq_block_shape(gpq):
    s = encode(gpq, parse_formula(GPQ_NEXT))
    assert s.logic == "NRA"
    assert len(s.blocks) == len(gpq.states)  # one block per start state
    for b in s.blocks:
        assert (b.kind, b.agents, b.vars) == ("E", (1,), ("x",))
        assert len(b.strategy_vars) == 3 and b.mode_vars == []
        assert sorted(b.estr) == [(0, 0), (1, 0)]
    sums = [t for t in _walk(s.blocks[0].estr[(0, 0)]) if isinstance(t, tuple) and t[0] == "+"]
    assert sums == [("+", "sigma@1.s0.a0", "sigma@1.s0.a1")]


def test_kmem_adds_mode_functions(gpq):
    s = encode(gpq, parse_formula(GPQ_NEXT), memory=2)
    b = s.blocks[0]
    assert len(b.strategy_vars) == 3 * 2
    assert len(b.mode_vars) == 2 * (2 * 2 + 2)
    assert all(v.startswith(("modef@1.", "initf@1.")) for v in b.mode_vars)


def test_holds_hti_link(gpq):
    s = encode(gpq, parse_formula(GPQ_NEXT))
    link = loads("(or (and (= hti.n0.0@0 1) holds.n0.0@0) (and (= hti.n0.0@0 0) (not holds.n0.0@0)))")
    assert link in s.assertions


def test_quantifier_free_logic(coin):
    s = encode(coin, parse_formula("forall x. goal(x) | !goal(x)"))
    assert s.logic == "QF_NRA" and not s.blocks


def test_empty_script():
    assert emit_smtlib(SmtScript("QF_NRA", [], [])) == "(set-logic QF_NRA)\n(check-sat)\n"
    assert SmtScript("QF_NRA", [], []).empty


@pytest.mark.parametrize("text", [GPQ_NEXT, NEEDS_MEMORY, "forall x. true"])
def test_emit_parse_emit(gpq, text):
    first = emit_smtlib(encode(gpq, parse_formula(text), memory=2))
    assert emit_smtlib(parse_smtlib(first)) == first


def test_until_clause_structure(coin):
    s = encode(coin, parse_formula("exists x. E{1}[x] P(F goal(x)) > 0"))
    text = emit_smtlib(s)
    assert "(=> " in text and "d.n" in text


# s-expressions -------------------------------------------------------------------

@pytest.mark.parametrize("v,out", [(0, "0"), (3, "3"), (Fraction(1, 2), "(/ 1 2)"), (Fraction(-2, 3), "(- (/ 2 3))")])
def test_num(v, out):
    from hypergame.smt.sexpr import num
    assert num(v) == out


def test_sexpr_roundtrip():
    text = "(assert (exists ((x Real) (y Bool)) (and y (<= 0 x) |odd name|)))"
    t = loads(text)
    assert dumps(t) == text
    assert loads_all("; comment\n(a) (b c)") == [("a",), ("b", "c")]


@pytest.mark.parametrize("bad", ["(a", "a)", "(a))"])
def test_sexpr_unbalanced(bad):
    with pytest.raises(SexprError):
        loads_all(bad)


# solver interface -----------------------------------------------------------------

@pytest.mark.parametrize("out,status", [("sat\n", "sat"), ("unsat", "unsat"), ("unknown\n", "unknown"),
                                        ("timeout", "unknown"), ("(sat)", "sat")])
def test_parse_status(out, status):
    assert parse_status(out) == SolverStatus(status)


def test_parse_status_garbage():
    with pytest.raises(UnparseableOutput):
        parse_status("(error \"line 1\")")


def test_missing_solver(monkeypatch):
    monkeypatch.delenv("HYPERGAME_SOLVER", raising=False)
    with pytest.raises(SolverNotFound):
        solve_external("(check-sat)\n")
    with pytest.raises(SolverNotFound):
        solve_external("(check-sat)\n", command="no-such-solver-binary {file}")


needs_solver = pytest.mark.skipif(solver_command() is None, reason="no SMT solver available")


@needs_solver
def test_solver_gpq_finally_sat(gpq):
    s = encode(gpq, parse_formula("forall x. E{1}[x] P(F q(x)) = 1"))
    assert solve_external(s, solver_command(), timeout=60) == SolverStatus.SAT


@needs_solver
def test_solver_needs_memory_md_unsat(gpq):
    s = encode(gpq, parse_formula(NEEDS_MEMORY), restrict_deterministic=True)
    assert solve_external(s, solver_command(), timeout=60) == SolverStatus.UNSAT


@needs_solver
def test_solver_needs_memory_two_modes_sat(gpq):
    s = encode(gpq, parse_formula(NEEDS_MEMORY), memory=2, restrict_deterministic=True)
    assert solve_external(s, solver_command(), timeout=60) == SolverStatus.SAT
