"""Exact reachability probabilities on finite chains."""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Set, Tuple

ZERO = Fraction(0)
ONE = Fraction(1)


def prob0_states(trans: Dict, sat1: Set, sat2: Set) -> Set:
    """States from which ``sat1 U sat2`` has probability zero."""
    pred: Dict[Hashable, List] = {s: [] for s in trans}
    for s, row in trans.items():
        for t, p in row.items():
            if p:
                pred.setdefault(t, []).append(s)
    reach = set(s for s in trans if s in sat2)
    stack = list(reach)
    while stack:
        t = stack.pop()
        for s in pred.get(t, ()):
            if s not in reach and s in sat1:
                reach.add(s)
                stack.append(s)
    return set(trans) - reach


def prob1_states(trans: Dict, sat1: Set, sat2: Set, no: Set) -> Set:
    """States from which ``sat1 U sat2`` holds almost surely."""
    pred: Dict[Hashable, List] = {s: [] for s in trans}
    for s, row in trans.items():
        for t, p in row.items():
            if p:
                pred.setdefault(t, []).append(s)
    bad = set(no)
    stack = list(bad)
    while stack:
        t = stack.pop()
        for s in pred.get(t, ()):
            if s not in bad and s in sat1 and s not in sat2:
                bad.add(s)
                stack.append(s)
    return set(trans) - bad


def _bits(x: Fraction) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


def solve_exact(matrix: List[List[Fraction]], rhs: List[Fraction]) -> List[Fraction]:
    """Gaussian elimination over the rationals.

    The pivot is the non-zero candidate with the smallest bit size, which
    keeps intermediate numbers short.
    """
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        best = None
        for r in range(col, n):
            v = a[r][col]
            if v and (best is None or _bits(v) < _bits(a[best][col])):
                best = r
        if best is None:
            raise ZeroDivisionError("singular system")
        a[col], a[best] = a[best], a[col]
        piv = a[col][col]
        prow = a[col]
        for j in range(col, n + 1):
            prow[j] /= piv
        for r in range(n):
            if r != col:
                f = a[r][col]
                if f:
                    row = a[r]
                    for j in range(col, n + 1):
                        if prow[j]:
                            row[j] -= f * prow[j]
    return [a[i][n] for i in range(n)]


def until_values(trans: Dict, sat1: Iterable, sat2: Iterable) -> Tuple[Dict, int]:
    """Exact ``Pr(sat1 U sat2)`` for every state; also returns the number of
    linear systems solved (0 or 1)."""
    sat1 = set(sat1)
    sat2 = set(sat2)
    no = prob0_states(trans, sat1, sat2)
    yes = prob1_states(trans, sat1, sat2, no)
    vals = {s: (ONE if s in yes else ZERO) for s in trans}
    maybe = [s for s in trans if s not in yes and s not in no]
    if not maybe:
        return vals, 0
    idx = {s: i for i, s in enumerate(maybe)}
    n = len(maybe)
    mat = [[ZERO] * n for _ in range(n)]
    rhs = [ZERO] * n
    for s in maybe:
        i = idx[s]
        mat[i][i] += ONE
        for t, p in trans[s].items():
            if t in idx:
                mat[i][idx[t]] -= p
            elif t in yes:
                rhs[i] += p
    for s, v in zip(maybe, solve_exact(mat, rhs)):
        vals[s] = v
    return vals, 1


def until_probability(chain, sat1, sat2, start) -> Fraction:
    """``Pr_start(sat1 U sat2)`` on a ``Dtmc`` (or a plain transition dict)."""
    trans = chain.trans if hasattr(chain, "trans") else chain
    vals, _ = until_values(trans, sat1, sat2)
    return vals[start]


def qualitative_sets(chain, sat1, sat2):
    """``(S=0, S=1, S?)`` for ``sat1 U sat2``; the three sets partition the states."""
    trans = chain.trans if hasattr(chain, "trans") else chain
    sat1, sat2 = set(sat1), set(sat2)
    no = prob0_states(trans, sat1, sat2)
    yes = prob1_states(trans, sat1, sat2, no)
    return no, yes, set(trans) - no - yes
