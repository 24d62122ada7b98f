"""Exact value iteration for Until, used as an independent lower bound."""
from __future__ import annotations

from fractions import Fraction
from math import lcm


def value_iteration_until(chain, sat1, sat2, start, iterations: int) -> Fraction:
    """Bellman iterate ``n`` for ``sat1 U sat2`` starting from the zero vector.

    Iterates are kept over a common denominator ``D**n`` so the inner loop is
    integer arithmetic only.
    """
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    trans = chain.trans if hasattr(chain, "trans") else chain
    sat1, sat2 = set(sat1), set(sat2)
    if start in sat2:
        return Fraction(1)
    states = list(trans)
    idx = {s: i for i, s in enumerate(states)}
    den = 1
    for row in trans.values():
        for p in row.values():
            den = lcm(den, Fraction(p).denominator)
    rows = []
    for s in states:
        if s in sat2:
            rows.append(None)
        elif s in sat1:
            rows.append([(idx[t], int(Fraction(p) * den)) for t, p in trans[s].items() if p])
        else:
            rows.append(())
    # v / scale is the current iterate
    v = [1 if s in sat2 else 0 for s in states]
    scale = 1
    for _ in range(iterations):
        nscale = scale * den
        nv = []
        for i, row in enumerate(rows):
            if row is None:
                nv.append(nscale)
            elif not row:
                nv.append(0)
            else:
                nv.append(sum(c * v[j] for j, c in row))
        v, scale = nv, nscale
    return Fraction(v[idx[start]], scale)
