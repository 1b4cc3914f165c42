"""Pure-numpy fallbacks for the hot kernels.

Diagonal transition matrices (every shipped preset) go through a vectorized
per-coordinate linear filter; dense matrices fall back to a per-step loop.
"""

import numpy as np
from scipy.signal import lfilter


def affine_recursion(a, u, x0):
    """Iterate x[i+1] = a @ x[i] + u[i] from x[0] = x0; returns the full path."""
    n, d = u.shape
    out = np.empty((n + 1, d))
    out[0] = x0
    if np.count_nonzero(a - np.diag(np.diagonal(a))) == 0:
        for j in range(d):
            alpha = a[j, j]
            y, _ = lfilter([1.0], [1.0, -alpha], u[:, j], zi=[alpha * x0[j]])
            out[1:, j] = y
        return out
    x = np.array(x0, dtype=float)
    for i in range(n):
        x = a @ x + u[i]
        out[i + 1] = x
    return out


def truncated_second_moments(dx, threshold):
    """Keep flags, kept count and sum of outer products of rows with
    squared Euclidean norm <= threshold**2 (boundary rows are kept)."""
    sq = np.einsum("ij,ij->i", dx, dx)
    keep = sq <= threshold * threshold
    kept = dx[keep]
    acc = kept.T @ kept
    return keep, int(keep.sum()), acc
