"""Path-sampling kernels.

Two interchangeable backends consume the same pre-drawn uniforms and give
identical counts: a numba ``@njit`` loop and a vectorised numpy version.
Set ``HYPERGAME_DISABLE_JIT=1`` (or run without numba) to use numpy.

Chain layout: ``cdf[i, j]`` is the cumulative probability of successor
``succ[i, j]``; the last real column holds exactly 1.0 and padding holds
2.0.  ``status[i]`` is 0 (keep walking), 1 (success) or 2 (failure).
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - import guard
    import numba
except ImportError:  # pragma: no cover
    numba = None

JIT_DISABLED = os.environ.get("HYPERGAME_DISABLE_JIT", "").strip() not in ("", "0")
HAVE_NUMBA = numba is not None


def backend_name() -> str:
    return "numba" if HAVE_NUMBA and not JIT_DISABLED else "numpy"


def sample_paths_numpy(cdf, succ, status, start, uniforms):
    """Return ``(successes, unresolved)`` over ``uniforms.shape[0]`` paths."""
    n, horizon = uniforms.shape
    state = np.full(n, start, dtype=np.int64)
    done = status[state] != 0
    for h in range(horizon):
        active = np.flatnonzero(~done)
        if active.size == 0:
            break
        cur = state[active]
        u = uniforms[active, h]
        j = (cdf[cur] <= u[:, None]).sum(axis=1)
        state[active] = succ[cur, j]
        done[active] = status[state[active]] != 0
    final = status[state]
    return int((final == 1).sum()), int((final == 0).sum())


def _sample_paths_loop(cdf, succ, status, start, uniforms):
    n, horizon = uniforms.shape
    width = cdf.shape[1]
    wins = 0
    open_ = 0
    for i in range(n):
        s = start
        h = 0
        while status[s] == 0 and h < horizon:
            u = uniforms[i, h]
            j = 0
            for c in range(width):
                if cdf[s, c] <= u:
                    j += 1
            s = succ[s, j]
            h += 1
        if status[s] == 1:
            wins += 1
        elif status[s] == 0:
            open_ += 1
    return wins, open_


if HAVE_NUMBA:
    sample_paths_numba = numba.njit(cache=False, nogil=True)(_sample_paths_loop)
else:  # pragma: no cover
    sample_paths_numba = None


def sample_paths(cdf, succ, status, start, uniforms, backend=None):
    backend = backend or backend_name()
    if backend == "numba":
        if sample_paths_numba is None:
            raise RuntimeError("numba is not available")
        w, o = sample_paths_numba(cdf, succ, status, np.int64(start), uniforms)
        return int(w), int(o)
    return sample_paths_numpy(cdf, succ, status, start, uniforms)
