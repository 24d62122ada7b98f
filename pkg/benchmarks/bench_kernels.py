"""Compare the numba and numpy path-sampling kernels on a random chain.

    python benchmarks/bench_kernels.py [--states 200] [--paths 200000] [--horizon 400]
"""
import argparse
import time

import numpy as np

from hypergame import _kernels


def random_chain(n, width, rng):
    p = rng.random((n, width))
    p /= p.sum(axis=1, keepdims=True)
    cdf = np.cumsum(p, axis=1)
    cdf[:, -1] = 1.0
    succ = rng.integers(0, n, size=(n, width))
    status = np.zeros(n, dtype=np.int8)
    status[: max(1, n // 20)] = 1
    status[-max(1, n // 20):] = 2
    return cdf, succ, status


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--states", type=int, default=200)
    ap.add_argument("--width", type=int, default=4)
    ap.add_argument("--paths", type=int, default=200_000)
    ap.add_argument("--horizon", type=int, default=400)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.Generator(np.random.PCG64(args.seed))
    cdf, succ, status = random_chain(args.states, args.width, rng)
    start = args.states // 2
    u = rng.random((args.paths, args.horizon))

    t_np, r_np = timed(_kernels.sample_paths, cdf, succ, status, start, u, "numpy")
    print(f"numpy : {t_np:8.3f} s  wins={r_np[0]} open={r_np[1]}")
    if _kernels.HAVE_NUMBA:
        _kernels.sample_paths(cdf, succ, status, start, u[:10], "numba")  # compile
        t_nb, r_nb = timed(_kernels.sample_paths, cdf, succ, status, start, u, "numba")
        print(f"numba : {t_nb:8.3f} s  wins={r_nb[0]} open={r_nb[1]}")
        print(f"speedup {t_np / t_nb:.1f}x, identical counts: {r_np == r_nb}")
    else:
        print("numba not installed")


if __name__ == "__main__":
    main()
