"""Well-formedness conditions.

* C1: every variable read by an atom or an equality is state-quantified
  above it.
* C2: the variables of every strategy quantifier are state-quantified above it.
* C3: every ``P(...)`` sits below strategy quantifiers that cover all agents.
  ``strict=True`` demands coverage for every prefix variable; ``strict=False``
  only for the variables the path formula reads, which is what evaluation
  needs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .ast import (And, Arith, Atom, Finally, Globally, Implies, Next, Not, Or, ProbCompare, ProbOf,
                  StateQuant, StratQuant, Until, VarEq, children, support)


@dataclass
class Violation:
    code: str  # C1 C2 C3 AGENT
    message: str
    span: Optional[Tuple[int, int]] = None

    def to_json(self):
        d = {"code": self.code, "message": self.message}
        if self.span:
            d["line"], d["column"] = self.span
        return d


@dataclass
class WellFormedness:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


class NotWellFormed(ValueError):
    def __init__(self, report: WellFormedness):
        self.report = report
        super().__init__("; ".join(f"{v.code}: {v.message}" for v in report.violations))


def check_well_formed(f, num_agents: int, strict: bool = True) -> WellFormedness:
    rep = WellFormedness()
    prefix_vars = []
    while isinstance(f, StateQuant):
        prefix_vars.append(f.var)
        f = f.body
    bound = frozenset(prefix_vars)
    all_agents = frozenset(range(1, num_agents + 1))

    def visit(n, covered: frozenset):
        if isinstance(n, Atom):
            if n.var not in bound:
                rep.violations.append(Violation("C1", f"variable {n.var!r} in {n.prop}({n.var}) is not quantified", n.span))
        elif isinstance(n, VarEq):
            for v in (n.left, n.right):
                if v not in bound:
                    rep.violations.append(Violation("C1", f"variable {v!r} in equality is not quantified", n.span))
        elif isinstance(n, StratQuant):
            for v in n.vars:
                if v not in bound:
                    rep.violations.append(Violation("C2", f"strategy quantifier names unquantified variable {v!r}", n.span))
            for a in n.agents:
                if a not in all_agents:
                    rep.violations.append(Violation("AGENT", f"agent {a} outside 1..{num_agents}", n.span))
            covered = covered | {(v, a) for v in n.vars for a in n.agents}
        elif isinstance(n, ProbOf):
            need = bound if strict else support(n) & bound
            missing = sorted((v, a) for v in need for a in all_agents if (v, a) not in covered)
            if missing:
                desc = ", ".join(f"{v}/{a}" for v, a in missing[:6])
                rep.violations.append(Violation("C3", f"P(...) lacks strategies for {desc}", n.span))
        for c in children(n):
            visit(c, covered)

    visit(f, frozenset())
    return rep


def require_well_formed(f, num_agents: int, strict: bool = False) -> None:
    rep = check_well_formed(f, num_agents, strict)
    if not rep.ok:
        raise NotWellFormed(rep)
