#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times the two hot kernels (path recursion and truncated second moments) on
representative problem sizes, checks that the backends agree numerically,
and prints the speedups.  Run as ``python benchmarks/bench_kernels.py``.
"""

import time

import numpy as np

from semjd import _kernels_nb, _kernels_np


def timeit(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def bench_affine(n, d, diagonal):
    rng = np.random.default_rng(0)
    if diagonal:
        a = np.diag(1.0 - 1e-4 * rng.uniform(1.0, 5.0, size=d))
    else:
        m = rng.uniform(-1.0, 1.0, size=(d, d))
        # contractive transition keeps the long recursion stable
        a = np.eye(d) - 1e-4 * (m @ m.T / d + 0.5 * np.eye(d))
    u = rng.standard_normal((n, d)) * 0.01
    x0 = rng.standard_normal(d)
    _kernels_nb.affine_recursion(a, u, x0)  # compile outside the timing
    t_nb, out_nb = timeit(_kernels_nb.affine_recursion, a, u, x0)
    t_np, out_np = timeit(_kernels_np.affine_recursion, a, u, x0)
    diff = float(np.max(np.abs(out_nb - out_np)))
    kind = "diag " if diagonal else "dense"
    print(
        f"path recursion  n={n:>9,} d={d:<3} {kind}  "
        f"numba {t_nb * 1e3:8.2f} ms   numpy {t_np * 1e3:8.2f} ms   "
        f"speedup {t_np / t_nb:6.1f}x   max|diff| {diff:.1e}"
    )


def bench_truncation(n, p):
    rng = np.random.default_rng(1)
    dx = rng.standard_normal((n, p)) * 0.01
    dx[rng.choice(n, size=n // 1000, replace=False)] *= 50.0
    thr = 0.05
    _kernels_nb.truncated_second_moments(dx, thr)
    t_nb, (keep_nb, kept_nb, acc_nb) = timeit(_kernels_nb.truncated_second_moments, dx, thr)
    t_np, (keep_np, kept_np, acc_np) = timeit(_kernels_np.truncated_second_moments, dx, thr)
    assert kept_nb == kept_np
    diff = float(np.max(np.abs(acc_nb - acc_np)))
    print(
        f"trunc. moments  n={n:>9,} p={p:<3}        "
        f"numba {t_nb * 1e3:8.2f} ms   numpy {t_np * 1e3:8.2f} ms   "
        f"speedup {t_np / t_nb:6.1f}x   max|diff| {diff:.1e}"
    )


def main():
    print("kernel backends: numba vs pure numpy (best of 5 runs)\n")
    for n in (100_000, 1_000_000):
        bench_affine(n, 1, diagonal=True)
        bench_affine(n, 10, diagonal=True)
        bench_affine(n, 10, diagonal=False)
    print()
    for n in (100_000, 1_000_000):
        bench_truncation(n, 15)


if __name__ == "__main__":
    main()
