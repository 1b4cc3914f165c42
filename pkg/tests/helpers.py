"""Shared test utilities: hand-built reference values and small model specs."""

import numpy as np

from semjd import EntryMap, Free, StructuralSpec, validate_spec

# Reference generative-model constants, entered by hand and assembled with
# plain matrix arithmetic, independently of the package's entry-map machinery.
LOADINGS_1 = np.array([1.0, 0.2, 0.4, 0.1, 0.7]).reshape(5, 1)
LOADINGS_2 = np.array(
    [
        [1.0, 0.2, 0.9, 1.2, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.6, 0.4, 0.7],
    ]
).T
REGRESSION = np.array([[0.7], [-0.5]])
FACTOR_VAR = 0.49  # 0.7**2
DELTA_VARS = np.array([0.81, 0.49, 0.25, 0.16, 0.64])
EPS_VARS = np.array([0.16, 0.81, 0.09, 0.36, 0.16, 0.25, 0.64, 0.36, 0.49, 0.09])
ZETA_VARS = np.array([0.25, 0.64])


def hand_built_sigma0() -> np.ndarray:
    """The true observable covariance from the tabulated constants."""
    s11 = FACTOR_VAR * (LOADINGS_1 @ LOADINGS_1.T) + np.diag(DELTA_VARS)
    s12 = FACTOR_VAR * LOADINGS_1 @ REGRESSION.T @ LOADINGS_2.T
    inner = FACTOR_VAR * (REGRESSION @ REGRESSION.T) + np.diag(ZETA_VARS)
    s22 = LOADINGS_2 @ inner @ LOADINGS_2.T + np.diag(EPS_VARS)
    top = np.hstack([s11, s12])
    bottom = np.hstack([s12.T, s22])
    return np.vstack([top, bottom])


def diag_error_spec() -> StructuralSpec:
    """p = 2 model whose covariance is diag(theta0, theta1)."""
    spec = StructuralSpec(
        p1=1,
        p2=1,
        k1=1,
        k2=1,
        lambda1=EntryMap.fixed([[0.0]]),
        lambda2=EntryMap.fixed([[0.0]]),
        b=EntryMap.fixed([[0.0]]),
        gamma=EntryMap.fixed([[0.0]]),
        sigma_xi=EntryMap.fixed([[1.0]]),
        sigma_delta=EntryMap.diag([Free(0)]),
        sigma_eps=EntryMap.diag([Free(1)]),
        sigma_zeta=EntryMap.fixed([[1.0]]),
    )
    return validate_spec(spec)


def shared_variance_spec() -> StructuralSpec:
    """p = 2 model with covariance theta * I via an equality constraint."""
    spec = StructuralSpec(
        p1=1,
        p2=1,
        k1=1,
        k2=1,
        lambda1=EntryMap.fixed([[0.0]]),
        lambda2=EntryMap.fixed([[0.0]]),
        b=EntryMap.fixed([[0.0]]),
        gamma=EntryMap.fixed([[0.0]]),
        sigma_xi=EntryMap.fixed([[1.0]]),
        sigma_delta=EntryMap.diag([Free(0)]),
        sigma_eps=EntryMap.diag([Free(0)]),
        sigma_zeta=EntryMap.fixed([[1.0]]),
    )
    return validate_spec(spec)


def single_param_spec() -> StructuralSpec:
    """Factor variance free, everything else fixed; only sigma[0, 0] moves."""
    spec = StructuralSpec(
        p1=1,
        p2=1,
        k1=1,
        k2=1,
        lambda1=EntryMap.fixed([[1.0]]),
        lambda2=EntryMap.fixed([[0.0]]),
        b=EntryMap.fixed([[0.0]]),
        gamma=EntryMap.fixed([[0.0]]),
        sigma_xi=EntryMap.diag([Free(0)]),
        sigma_delta=EntryMap.fixed([[0.5]]),
        sigma_eps=EntryMap.fixed([[1.0]]),
        sigma_zeta=EntryMap.fixed([[1.0]]),
    )
    return validate_spec(spec)


def small_factor_spec() -> StructuralSpec:
    """p = 5 two-group factor model with a handful of free cells (q = 7)."""
    spec = StructuralSpec(
        p1=2,
        p2=3,
        k1=1,
        k2=1,
        lambda1=EntryMap.from_cells([[1.0], [Free(0)]]),
        lambda2=EntryMap.from_cells([[1.0], [Free(1)], [0.5]]),
        b=EntryMap.fixed([[0.0]]),
        gamma=EntryMap.from_cells([[Free(2)]]),
        sigma_xi=EntryMap.diag([Free(3)]),
        sigma_delta=EntryMap.diag([Free(4), 0.3]),
        sigma_eps=EntryMap.diag([Free(5), 0.4, 0.2]),
        sigma_zeta=EntryMap.diag([Free(6)]),
    )
    return validate_spec(spec)


def central_diff(f, x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central finite differences of f along each coordinate of x."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.size):
        step = rel_step * max(1.0, abs(x[k]))
        hi = x.copy()
        lo = x.copy()
        hi[k] += step
        lo[k] -= step
        cols.append((np.asarray(f(hi)) - np.asarray(f(lo))) / (2.0 * step))
    return np.stack(cols, axis=-1)


def random_walk_path(rng, n: int, p: int, scale: float = 1.0, h: float = 1e-3, spikes: int = 0):
    """Gaussian random-walk path with optional planted spike increments."""
    from semjd import PathData

    dx = rng.standard_normal((n, p)) * np.sqrt(h) * scale
    if spikes:
        rows = rng.choice(n, size=spikes, replace=False)
        dx[rows] += rng.standard_normal((spikes, p)) * 10.0
    x = np.vstack([np.zeros(p), np.cumsum(dx, axis=0)])
    return PathData(h, x)
