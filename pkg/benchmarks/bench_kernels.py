"""Numba versus pure-numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--max-m 16]

Each kernel is called once per backend before timing so JIT compilation is
excluded. Reported times are the best of ``--repeat`` runs, in milliseconds.
"""

import argparse
import time

import numpy as np

from cubeiso import _kernels_numba as nb
from cubeiso import _kernels_numpy as npk
from cubeiso.hypercube import build_function
from cubeiso.tribes import instance_to_function, sample_counterexample


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best * 1e3


def cases(max_m, rng):
    for m in (10, 14, 18, 20, 22):
        if m > max_m + 4:
            continue
        f = build_function(m, rng.integers(0, 2, size=1 << m, dtype=np.uint8))
        yield f"edges m={m}", lambda k, f=f: k.all_edge_counts(f.words, f.arity)
        yield f"sensitivity m={m}", lambda k, f=f: k.sensitivity_counts(f.bits, f.arity)
    for m in (8, 12, 14, 16):
        if m > max_m:
            continue
        f = build_function(m, rng.integers(0, 2, size=1 << m, dtype=np.uint8))
        yield f"mincut random m={m}", lambda k, f=f: k.monotone_min_cut(f.bits, f.arity)
    for n in (4, 8):
        f = instance_to_function(sample_counterexample(n, 0))
        yield f"mincut tribes n={n}", lambda k, f=f: k.monotone_min_cut(f.bits, f.arity)
    for m in (8, 10, 12):
        f = build_function(m, rng.integers(0, 2, size=1 << m, dtype=np.uint8))
        yield f"matching m={m}", lambda k, f=f: k.max_violation_matching(f.bits, f.arity)
    for n in (64, 1024):
        inst = sample_counterexample(n, 0)
        t0 = np.ascontiguousarray(inst.tribes - 1)
        xw = rng.integers(0, 2**64, size=(20_000, (n + 63) // 64), dtype=np.uint64)
        yield f"fired_stats n={n} x20000", lambda k, t0=t0, xw=xw: k.fired_stats(xw, t0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-m", type=int, default=16, help="largest arity for the min-cut cases")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'case':<28}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, call in cases(args.max_m, rng):
        call(nb)
        call(npk)
        t_np = best_of(lambda: call(npk), args.repeat)
        t_nb = best_of(lambda: call(nb), args.repeat)
        print(f"{name:<28}{t_np:>12.3f}{t_nb:>12.3f}{t_np / t_nb:>9.2f}x")


if __name__ == "__main__":
    main()
