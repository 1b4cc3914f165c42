"""Numba-compiled hot kernels (path recursion, truncated second moments)."""

import numpy as np
from numba import njit


@njit(cache=True)
def affine_recursion(a, u, x0):
    """Iterate x[i+1] = a @ x[i] + u[i] from x[0] = x0; returns the full path."""
    n, d = u.shape
    out = np.empty((n + 1, d))
    for j in range(d):
        out[0, j] = x0[j]
    for i in range(n):
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc += a[j, k] * out[i, k]
            out[i + 1, j] = acc + u[i, j]
    return out


@njit(cache=True)
def truncated_second_moments(dx, threshold):
    """Keep flags, kept count and sum of outer products of rows with
    squared Euclidean norm <= threshold**2 (boundary rows are kept)."""
    n, p = dx.shape
    keep = np.empty(n, np.bool_)
    acc = np.zeros((p, p))
    t2 = threshold * threshold
    kept = 0
    for i in range(n):
        s = 0.0
        for j in range(p):
            s += dx[i, j] * dx[i, j]
        if s <= t2:
            keep[i] = True
            kept += 1
            for j in range(p):
                for k in range(j, p):
                    acc[j, k] += dx[i, j] * dx[i, k]
        else:
            keep[i] = False
    for j in range(p):
        for k in range(j):
            acc[j, k] = acc[k, j]
    return keep, kept, acc
