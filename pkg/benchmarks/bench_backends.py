#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs every hot kernel on both backends with identical seeds, checks the
outputs agree bit for bit, and prints a timing table.  JIT compilation is
excluded by a warmup pass.

    python3 benchmarks/bench_backends.py [--trials N] [--repeat R]
"""

import argparse
import time

import numpy as np

from qfp import backend, kernels
from qfp.ecc import random_linear_code


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def bench(name, fn, repeat, results):
    row = {}
    outputs = {}
    for which in ("numba", "numpy"):
        if which == "numba" and not backend.HAVE_NUMBA:
            continue
        backend.set_backend(which)
        fn()  # warmup (JIT compile / cache touch)
        row[which], outputs[which] = best_of(fn, repeat)
    if len(outputs) == 2:
        same = np.array_equal(np.asarray(outputs["numba"]),
                              np.asarray(outputs["numpy"]))
        if not same:
            raise SystemExit(f"{name}: backends disagree")
    results.append((name, row))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    results = []

    probs = np.full(32, 1.0 / 32.0)
    bench("click_counts (k=10, m=16)",
          lambda: kernels.click_counts(probs, 10, args.trials, 42),
          args.repeat, results)

    bench("noise_verdicts (k=10, 1000 slots)",
          lambda: kernels.noise_verdicts(0.1, 0.8, 0.9, 0.5, 1e-4, 1000,
                                         10, args.trials, 42),
          args.repeat, results)

    code = random_linear_code(16, 64, seed=7)
    bench("min_nonzero_weight (n=16, m=64)",
          lambda: kernels.min_nonzero_weight(code.generator),
          args.repeat, results)

    bench("smp_exhaustive_search (q=3, 3x2)",
          lambda: kernels.smp_exhaustive_search(3, 3, 2),
          args.repeat, results)

    bench("smp_exhaustive_search (q=4, 3x3)",
          lambda: kernels.smp_exhaustive_search(4, 3, 3),
          args.repeat, results)

    backend.set_backend("auto")

    print(f"\n{'kernel':<40} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name, row in results:
        nb = row.get("numba")
        np_ = row.get("numpy")
        nb_s = f"{nb * 1e3:.2f} ms" if nb is not None else "n/a"
        np_s = f"{np_ * 1e3:.2f} ms" if np_ is not None else "n/a"
        speed = f"{np_ / nb:.1f}x" if nb and np_ else ""
        print(f"{name:<40} {nb_s:>12} {np_s:>12} {speed:>9}")


if __name__ == "__main__":
    main()
