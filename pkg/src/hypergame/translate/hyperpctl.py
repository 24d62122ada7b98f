"""HyperPCTL over DTMCs viewed as one-agent games."""
from __future__ import annotations

import re

from ..formula.ast import StateQuant, StratQuant, split_prefix, walk
from ..formula.parser import parse_formula


class BoundedUntilUnsupported(ValueError):
    pass


_BOUNDED = re.compile(r"\b[UFG]\s*(<=|<|\[)")


def translate_hyperpctl(f):
    """``Q1 x1 ... Qn xn. phi`` becomes ``Q1 x1 ... Qn xn. A{1}[x1..xn] phi``.

    Accepts source text or a parsed formula.  With no state quantifiers the
    body is returned unchanged and later fails well-formedness.
    """
    if isinstance(f, str):
        m = _BOUNDED.search(f)
        if m:
            raise BoundedUntilUnsupported(f"step-bounded operator at offset {m.start()}")
        f = parse_formula(f)
    prefix, body = split_prefix(f)
    if any(isinstance(n, StratQuant) for n in walk(body)):
        raise ValueError("HyperPCTL formulas have no strategy quantifiers")
    if prefix:
        body = StratQuant("A", (1,), tuple(v for _, v in prefix), body)
    for kind, v in reversed(prefix):
        body = StateQuant(kind, v, body)
    return body
