from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypergame.formula import (And, Arith, Atom, Const, HasStateQuantifier, Not, ParseError, PhType, ProbCompare,
                               ProbOf, StateQuant, StateQuantNotPrefix, StratQuant, TrueF, Until, VarEq,
                               check_well_formed, compute_ph_type, desugar, is_core, parse_formula, pretty,
                               tokenize)

from test_properties import _formulas

SYMMETRIC_START = ("forall x. exists y. E{1}[x] A{1}[y] A{2}[x,y] "
            "(init(x) & init(y)) -> P(F t(x)) >= P(F t(y))")
NEEDS_MEMORY = "exists x. E{1}[x] P(X (p(x) & P(X q(x)) = 1)) = 1"


def test_symmetric_start_structure():
    f = parse_formula(SYMMETRIC_START)
    assert (f.kind, f.var, f.body.kind, f.body.var) == ("forall", "x", "exists", "y")
    q = f.body.body
    assert isinstance(q, StratQuant) and (q.kind, q.agents, q.vars) == ("E", (1,), ("x",))
    assert (q.body.kind, q.body.agents, q.body.vars) == ("A", (1,), ("y",))
    assert (q.body.body.agents, q.body.body.vars) == ((2,), ("x", "y"))


@pytest.mark.parametrize("text", [SYMMETRIC_START, NEEDS_MEMORY, "forall x. true", "forall x. forall y. x == y"])
def test_roundtrip_fixed(text):
    f = parse_formula(text)
    assert parse_formula(pretty(f)) == f


def test_forall_true():
    assert parse_formula("forall x. true") == StateQuant("forall", "x", TrueF())


def test_spans():
    f = parse_formula("forall x.\n  p(x) & q(x)")
    assert (f.body.span, f.body.left.span, f.body.right.span) == ((2, 8), (2, 3), (2, 10))


@pytest.mark.parametrize("text,line,col", [
    ("forall x.\n  p(x) &", 2, 9),
    ("P(X p(x)) / 2 > 0", 1, 11),
    ("P(X p(x) U q(x)) > 0", 1, 10),
])
def test_syntax_errors_have_positions(text, line, col):
    with pytest.raises(ParseError) as e:
        parse_formula(text)
    assert (e.value.line, e.value.col) == (line, col)


def test_state_quant_not_prefix():
    with pytest.raises(StateQuantNotPrefix):
        parse_formula("forall x. E{1}[x] forall y. p(y)")


def test_reserved_words_are_not_props():
    with pytest.raises(ParseError):
        parse_formula("forall x. P(x)")


def test_rational_literals():
    f = parse_formula("forall x. E{1}[x] P(X p(x)) >= 0.25")
    assert f.body.body.right == Const(Fraction(1, 4))
    tok = tokenize("3/4")[0]
    assert (tok.kind, tok.text) == ("num", "3/4")


# well-formedness ------------------------------------------------------------

def test_symmetric_start_well_formed():
    assert check_well_formed(parse_formula(SYMMETRIC_START), 2).ok


def test_missing_agent_is_c3():
    rep = check_well_formed(parse_formula("forall x. E{1}[x] P(X p(x))=1"), 2)
    assert [v.code for v in rep.violations] == ["C3"]


def test_unquantified_strategy_var_is_c2():
    rep = check_well_formed(parse_formula("forall x. E{1,2}[x] E{1}[y] p(x)"), 2)
    assert [v.code for v in rep.violations] == ["C2"]


def test_free_atom_is_c1():
    rep = check_well_formed(parse_formula("P(X p(x)) = P(X p(x))"), 1)
    assert rep.violations and {v.code for v in rep.violations} == {"C1"}


def test_agent_out_of_range():
    rep = check_well_formed(parse_formula("forall x. E{3}[x] p(x)"), 2)
    assert [v.code for v in rep.violations] == ["AGENT"]


def test_weak_c3_only_needs_support():
    f = parse_formula("forall x. forall y. E{1}[x] P(X p(x)) = 1")
    assert not check_well_formed(f, 1).ok
    assert check_well_formed(f, 1, strict=False).ok


def _rename(f, m):
    import dataclasses
    if isinstance(f, StateQuant):
        return StateQuant(f.kind, m[f.var], _rename(f.body, m))
    if isinstance(f, StratQuant):
        return StratQuant(f.kind, f.agents, tuple(m[v] for v in f.vars), _rename(f.body, m))
    if isinstance(f, Atom):
        return Atom(f.prop, m[f.var])
    if isinstance(f, VarEq):
        return VarEq(m[f.left], m[f.right])
    if isinstance(f, (Const, TrueF)):
        return f
    if isinstance(f, Arith):
        return Arith(f.op, tuple(_rename(o, m) for o in f.operands))
    kw = {}
    for fld in dataclasses.fields(f):
        if fld.name == "span":
            continue
        v = getattr(f, fld.name)
        kw[fld.name] = _rename(v, m) if not isinstance(v, str) else v
    return type(f)(**kw)


@given(_formulas(), st.integers(1, 3))
@settings(max_examples=200, derandomize=True, deadline=None)
def test_well_formedness_alpha_invariant(f, k):
    m = {"x": "u", "y": "v"}
    a = check_well_formed(f, k)
    b = check_well_formed(_rename(f, m), k)
    assert [v.code for v in a.violations] == [v.code for v in b.violations]


# desugaring -----------------------------------------------------------------

def test_desugar_finally():
    assert desugar(parse_formula("P(F q(x)) = 1")) == parse_formula("P(true U q(x)) = 1")


def test_desugar_globally():
    assert desugar(parse_formula("P(G p(x)) = 1")) == parse_formula("1 - P(true U !p(x)) = 1")


def test_desugar_or_implies():
    assert desugar(parse_formula("p(x) | q(x)")) == Not(And(Not(Atom("p", "x")), Not(Atom("q", "x"))))
    assert desugar(parse_formula("p(x) -> q(x)")) == Not(And(Atom("p", "x"), Not(Atom("q", "x"))))


@given(_formulas())
@settings(max_examples=200, derandomize=True, deadline=None)
def test_desugar_idempotent_and_core(f):
    d = desugar(f)
    assert desugar(d) == d
    assert is_core(d)


# types ----------------------------------------------------------------------

def test_type_atom():
    assert compute_ph_type(parse_formula("p(x)")) == PhType("Delta", 0)
    assert str(PhType("Sigma", 2)) == "Σ2"


def test_type_state_quantifier_rejected():
    with pytest.raises(HasStateQuantifier):
        compute_ph_type(parse_formula("forall x. p(x)"))


def test_type_zero_level_collapses():
    assert compute_ph_type(parse_formula("P(X p(x)) = 1")) == PhType("Delta", 0)


def _nested_quant(depth, kinds):
    f = "P(X p(x)) >= 1/2"
    for i in range(depth):
        f = f"{kinds[i % len(kinds)]}{{1}}[x] ({f})"
    return parse_formula(f)


@given(st.integers(0, 4), st.sampled_from(["E", "A", "EA", "AE"]), st.integers(0, 3))
@settings(max_examples=200, derandomize=True, deadline=None)
def test_double_negation_preserves_type(depth, kinds, extra):
    f = _nested_quant(depth, kinds)
    for _ in range(extra):
        f = And(f, Atom("q", "x"))
    assert compute_ph_type(Not(Not(f))) == compute_ph_type(f)


_qf_leaf = st.one_of(st.builds(TrueF), st.builds(Atom, st.sampled_from(["p", "q"]), st.just("x")),
                     st.builds(VarEq, st.just("x"), st.just("x")),
                     st.builds(ProbCompare, st.builds(Const, st.fractions(0, 1, max_denominator=4)),
                               st.sampled_from(["<", "="]), st.builds(Const, st.fractions(0, 1, max_denominator=4))))
_qf = st.recursive(_qf_leaf, lambda i: st.one_of(st.builds(Not, i), st.builds(And, i, i)), max_leaves=8)


@given(_qf)
@settings(max_examples=200, derandomize=True, deadline=None)
def test_quantifier_free_is_delta(f):
    assert compute_ph_type(f).shape == "Delta"


def test_type_until_over_sigma():
    f = ProbCompare(ProbOf(Until(TrueF(), parse_formula("E{1}[x] P(X p(x)) = 1"))), ">", Const(Fraction(0)))
    assert compute_ph_type(f) == PhType("Delta", 2)
