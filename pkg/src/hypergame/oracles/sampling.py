"""Monte Carlo estimation of path probabilities in the composed chain."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .. import _kernels
from ..checker import Checker, EvalContext
from ..formula.ast import Finally, Globally, Next, Not, ProbOf, TrueF, Until, support
from ..formula.desugar import desugar

CHUNK = 8192
DELTA = 1e-3


class NonPositiveSamples(ValueError):
    pass


@dataclass
class MonteCarloResult:
    estimate: float
    half_width: float
    truncated: bool
    unresolved: int
    seed: int
    samples: int
    horizon: int
    delta: float
    rng: str
    backend: str

    def to_json(self) -> dict:
        return asdict(self)


def hoeffding_half_width(samples: int, delta: float = DELTA) -> float:
    return math.sqrt(math.log(2.0 / delta) / (2.0 * samples))


def _layout(ck: Checker, env: EvalContext, path, names):
    """Float arrays for the sampler plus the number of composed states."""
    start = env.position(names)
    if isinstance(path, Next):
        rows = ck.step(env, names, start)
        status = [0] + [1 if ck.holds(path.body, env.at(names, pos)) else 2 for pos, _ in rows]
        nodes = [start] + [pos for pos, _ in rows]
        edges = {0: [(i + 1, p) for i, (_, p) in enumerate(rows)]}
        for i in range(1, len(nodes)):
            edges[i] = [(i, Fraction(1))]
        return nodes, edges, status, 1
    index = {start: 0}
    nodes = [start]
    status = []
    edges = {}
    i = 0
    while i < len(nodes):
        pos = nodes[i]
        here = env.at(names, pos)
        if ck.holds(path.right, here):
            status.append(1)
            edges[i] = [(i, Fraction(1))]
        elif not ck.holds(path.left, here):
            status.append(2)
            edges[i] = [(i, Fraction(1))]
        else:
            status.append(0)
            row = []
            for nxt, p in ck.step(env, names, pos):
                if nxt not in index:
                    index[nxt] = len(nodes)
                    nodes.append(nxt)
                row.append((index[nxt], p))
            edges[i] = row
        i += 1
    return nodes, edges, status, None


def _prune(edges, status):
    """Undecided nodes that cannot reach a success node become failures.

    Pure graph reachability over positive edges, so the estimate stays
    independent of the exact solver.
    """
    preds = {i: [] for i in edges}
    for i, row in edges.items():
        for j, p in row:
            if p > 0 and j != i:
                preds[j].append(i)
    good = {i for i, st in enumerate(status) if st == 1}
    stack = list(good)
    while stack:
        j = stack.pop()
        for i in preds[j]:
            if i not in good and status[i] == 0:
                good.add(i)
                stack.append(i)
    return [2 if st == 0 and i not in good else st for i, st in enumerate(status)]


def _arrays(edges, status):
    n = len(status)
    width = max(len(r) for r in edges.values())
    cdf = np.full((n, width), 2.0)
    succ = np.zeros((n, width), dtype=np.int64)
    for i, row in edges.items():
        acc = Fraction(0)
        for c, (j, p) in enumerate(row):
            acc += p
            cdf[i, c] = float(acc)
            succ[i, c] = j
        cdf[i, len(row) - 1] = 1.0
        succ[i, len(row):] = row[-1][0]
    return cdf, succ, np.asarray(status, dtype=np.int8)


def monte_carlo_prob(ctx: EvalContext, path, samples: int = 100_000, seed: int = 0,
                     horizon: Optional[int] = None, delta: float = DELTA, jobs: int = 1,
                     backend: Optional[str] = None, strategy_class="md") -> MonteCarloResult:
    """Estimate ``P(path)`` from ``ctx`` by sampling composed-chain paths.

    Nested state subformulas are decided exactly by the checker.  Paths still
    undecided after ``horizon`` steps count as failures (``truncated``).
    Chunks draw from ``SeedSequence(seed).spawn`` so the estimate does not
    depend on ``jobs``.
    """
    if samples <= 0:
        raise NonPositiveSamples("samples must be positive")
    if isinstance(path, ProbOf):
        path = path.path
    negate = False
    if isinstance(path, Globally):
        path, negate = Until(TrueF(), Not(path.body)), True
    elif isinstance(path, Finally):
        path = Until(TrueF(), path.body)
    path = desugar(ProbOf(path)).path
    ck = Checker(ctx.game, strategy_class)
    names = tuple(sorted(support(path)))
    nodes, edges, status, fixed_h = _layout(ck, ctx, path, names)
    status = _prune(edges, status)
    if horizon is None:
        horizon = fixed_h or 10 * len(nodes)
    horizon = max(int(horizon), 1)
    cdf, succ, st = _arrays(edges, status)
    backend = backend or _kernels.backend_name()

    n_chunks = -(-samples // CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)

    def run(k):
        m = min(CHUNK, samples - k * CHUNK)
        rng = np.random.Generator(np.random.PCG64(seqs[k]))
        u = rng.random((m, horizon))
        return _kernels.sample_paths(cdf, succ, st, 0, u, backend)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(run, range(n_chunks)))
    else:
        parts = [run(k) for k in range(n_chunks)]
    wins = sum(w for w, _ in parts)
    unresolved = sum(o for _, o in parts)
    est = wins / samples
    if negate:
        est = 1.0 - est
    return MonteCarloResult(est, hoeffding_half_width(samples, delta), unresolved > 0, unresolved,
                            seed, samples, horizon, delta, "numpy.PCG64/SeedSequence.spawn", backend)
