"""Quasi-likelihood maximization.

A hand-rolled BFGS ascent (inverse-Hessian rank-2 update, backtracking line
search with a sufficient-increase condition) on a working parameterization in
which positivity-flagged coordinates are optimized on log scale, so trial
points stay feasible without box constraints.  Trial points with a
non-positive-definite implied covariance are rejected inside the line search
by assigning an objective of -inf.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import AllStartsFailed, InitNotPD, NumericalError
from .likelihood import TruncationStats, quasi_loglik, quasi_loglik_gradient
from .sem import StructuralSpec, ThetaVector, assemble_sigma

ARMIJO_C1 = 1e-4
BACKTRACK_SHRINK = 0.5
MAX_BACKTRACKS = 40
CURVATURE_SKIP_RTOL = 1e-12


@dataclass(frozen=True)
class GivenPoint:
    """Start the optimizer at a specific parameter vector."""

    theta: np.ndarray


@dataclass(frozen=True)
class MultiStart:
    """Run several starts; random or perturbed around an optional center."""

    count: int
    seed: int = 0
    center: np.ndarray | None = None


@dataclass
class FitConfig:
    init: GivenPoint | MultiStart
    max_iters: int = 500
    grad_tol: float = 1e-6
    step_tol: float = 1e-10
    reparameterize_positives: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.grad_tol <= 0.0 or self.step_tol <= 0.0:
            raise ValueError("tolerances must be positive")


@dataclass
class FitResult:
    """Outcome of one maximization.

    ``converged`` is True when the working-parameterization gradient norm
    fell below grad_tol * max(1, |H|); ``history`` holds the accepted
    objective values (monotone non-decreasing).
    """

    theta_hat: ThetaVector
    h_value: float
    converged: bool
    iterations: int
    grad_norm: float
    n_kept: int
    history: np.ndarray


def _to_working(theta: np.ndarray, positive: np.ndarray, enabled: bool) -> np.ndarray:
    phi = np.array(theta, dtype=float)
    if enabled:
        phi[positive] = np.log(phi[positive])
    return phi


def _from_working(phi: np.ndarray, positive: np.ndarray, enabled: bool) -> np.ndarray:
    theta = np.array(phi, dtype=float)
    if enabled:
        with np.errstate(over="ignore"):
            theta[positive] = np.exp(theta[positive])
    return theta


def fit(
    spec: StructuralSpec,
    stats: TruncationStats,
    n: int,
    h: float,
    config: FitConfig,
) -> FitResult:
    """Maximize the quasi-log-likelihood for one model on fixed statistics.

    Parameters
    ----------
    spec : StructuralSpec
        Validated candidate model.
    stats : TruncationStats
        Sufficient statistics of the data (shared across candidates).
    n, h : int, float
        Sample size and step of the grid the statistics came from.
    config : FitConfig
        Start point, iteration budget and tolerances.  A
        :class:`MultiStart` init delegates to :func:`multi_start_fit`.

    Raises
    ------
    InitNotPD
        If the starting point does not give a positive definite covariance.
    """
    if isinstance(config.init, MultiStart):
        return multi_start_fit(spec, stats, n, h, config)

    if spec.q == 0:
        theta = ThetaVector.for_spec(spec, np.empty(0))
        cov = assemble_sigma(spec, theta)
        if not cov.is_pd:
            raise InitNotPD("fixed covariance is not positive definite")
        h0 = quasi_loglik(cov, stats, n)
        return FitResult(theta, h0, True, 0, 0.0, stats.n_kept, np.array([h0]))

    theta0 = ThetaVector.for_spec(spec, config.init.theta)
    positive = spec.positive
    logscale = config.reparameterize_positives

    def objective(phi: np.ndarray) -> float:
        theta = _from_working(phi, positive, logscale)
        if not np.all(np.isfinite(theta)):
            return -np.inf
        try:
            cov = assemble_sigma(spec, theta)
            if not cov.is_pd:
                return -np.inf
            return quasi_loglik(cov, stats, n)
        except NumericalError:
            return -np.inf

    def gradient(phi: np.ndarray) -> np.ndarray:
        theta = _from_working(phi, positive, logscale)
        g = quasi_loglik_gradient(spec, theta, stats, n)
        if logscale:
            g = g.copy()
            g[positive] *= theta[positive]
        return g

    phi = _to_working(theta0.values, positive, logscale)
    h_val = objective(phi)
    if not np.isfinite(h_val):
        raise InitNotPD("starting point does not give a positive definite covariance")
    g = gradient(phi)

    q = spec.q
    h_inv = np.eye(q)
    first_update = True
    history = [h_val]
    iterations = 0
    converged = False

    for _ in range(config.max_iters):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= config.grad_tol * max(1.0, abs(h_val)):
            converged = True
            break

        direction = h_inv @ g
        slope = float(g @ direction)
        if slope <= 0.0:
            h_inv = np.eye(q)
            direction = g
            slope = float(g @ g)
            if slope <= 0.0:
                break  # no ascent direction left; report best-so-far
        step = 1.0
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            phi_new = phi + step * direction
            h_new = objective(phi_new)
            if np.isfinite(h_new) and h_new >= h_val + ARMIJO_C1 * step * slope:
                accepted = True
                break
            step *= BACKTRACK_SHRINK
        if not accepted:
            break

        s = phi_new - phi
        g_new = gradient(phi_new)
        y = g_new - g
        ys = float(y @ s)
        phi, h_val, g = phi_new, h_new, g_new
        iterations += 1
        history.append(h_val)

        # maximization BFGS: update with (s, -y); curvature needs -y.s > 0
        if -ys > CURVATURE_SKIP_RTOL * np.linalg.norm(y) * np.linalg.norm(s):
            if first_update:
                h_inv = (-ys / float(y @ y)) * np.eye(q)
                first_update = False
            rho = 1.0 / (-ys)
            sy = np.outer(s, y)
            h_inv = (np.eye(q) + rho * sy) @ h_inv @ (np.eye(q) + rho * sy.T) + rho * np.outer(s, s)

        if float(np.linalg.norm(s)) < config.step_tol:
            gnorm = float(np.linalg.norm(g))
            converged = gnorm <= config.grad_tol * max(1.0, abs(h_val))
            break
    else:
        gnorm = float(np.linalg.norm(g))
        converged = gnorm <= config.grad_tol * max(1.0, abs(h_val))

    theta_hat = ThetaVector.for_spec(spec, _from_working(phi, positive, logscale))
    return FitResult(
        theta_hat,
        h_val,
        converged,
        iterations,
        float(np.linalg.norm(g)),
        stats.n_kept,
        np.asarray(history),
    )


def _random_start(
    spec: StructuralSpec, rng: np.random.Generator, center: np.ndarray | None
) -> np.ndarray:
    positive = spec.positive
    if center is None:
        t = rng.uniform(-1.5, 1.5, size=spec.q)
        t[positive] = np.exp(rng.uniform(np.log(0.1), np.log(2.0), size=int(positive.sum())))
        return t
    t = center + rng.normal(0.0, 0.5, size=spec.q) * (1.0 + np.abs(center))
    t[positive] = center[positive] * np.exp(rng.normal(0.0, 0.5, size=int(positive.sum())))
    return t


def multi_start_fit(
    spec: StructuralSpec,
    stats: TruncationStats,
    n: int,
    h: float,
    config: FitConfig,
) -> FitResult:
    """Best result over several starts; ties go to the lowest start index.

    A :class:`GivenPoint` init degenerates to a single start at that point.
    With a :class:`MultiStart` init, start 0 is the center when one is given
    and all remaining starts are positivity-respecting perturbations
    (or fully random draws when there is no center).

    Raises :class:`AllStartsFailed` when no start produces a result.
    """
    init = config.init
    if isinstance(init, GivenPoint):
        starts = [np.asarray(init.theta, dtype=float)]
    else:
        rng = np.random.default_rng(init.seed)
        starts = []
        for i in range(init.count):
            if init.center is not None and i == 0:
                starts.append(np.asarray(init.center, dtype=float))
            else:
                starts.append(_random_start(spec, rng, init.center))
    if not starts:
        raise AllStartsFailed("no starts requested")

    best: FitResult | None = None
    failures = 0
    for theta0 in starts:
        try:
            result = fit(spec, stats, n, h, replace(config, init=GivenPoint(theta0)))
        except NumericalError:
            failures += 1
            continue
        if best is None or result.h_value > best.h_value:
            best = result
    if best is None:
        raise AllStartsFailed(f"all {failures} starts failed")
    return best
