"""Path simulation for the generative model behind the candidate SEMs.

Latent blocks are jump-diffusions with affine drift a(x) = -K (x - mu),
constant diffusion S and per-coordinate compound-Poisson jumps with normal
sizes, discretized by one Euler step per observation interval.  Observables
are built through the factor equations

    x1 = L1 @ xi + delta
    eta = inv(I - B) @ (G @ xi + zeta)
    x2 = L2 @ eta + eps

and stacked to p = p1 + p2 columns.  Each latent block draws from its own
random substream split deterministically from the master seed, so editing
one block's spec does not perturb the draws of the others.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, SingularPsi
from .likelihood import PathData


@dataclass
class LatentSdeSpec:
    """One latent block: drift -K(x - mu), diffusion S, per-coordinate jumps."""

    dim: int
    k: np.ndarray
    mu: np.ndarray
    s: np.ndarray
    jump_rate: np.ndarray
    jump_var: np.ndarray
    x0: np.ndarray

    def __post_init__(self):
        self.k = np.atleast_2d(np.asarray(self.k, dtype=float))
        self.mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        self.s = np.atleast_2d(np.asarray(self.s, dtype=float))
        self.jump_rate = np.atleast_1d(np.asarray(self.jump_rate, dtype=float))
        self.jump_var = np.atleast_1d(np.asarray(self.jump_var, dtype=float))
        self.x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        d = self.dim
        if self.k.shape != (d, d) or self.s.shape[0] != d:
            raise DimensionMismatch("drift/diffusion shapes disagree with dim")
        for name in ("mu", "jump_rate", "jump_var", "x0"):
            if getattr(self, name).shape != (d,):
                raise DimensionMismatch(f"{name} must have length {d}")
        if np.any(self.jump_rate < 0.0):
            raise ValueError("jump intensities must be >= 0")
        if np.any(self.jump_var[self.jump_rate > 0.0] <= 0.0):
            raise ValueError("jump-size variance must be positive where jumps occur")
        if not np.all(np.isfinite(self.s)):
            raise ValueError("diffusion coefficients must be finite")

    def volatility(self) -> np.ndarray:
        """Instantaneous covariance S @ S.T of the continuous part."""
        return self.s @ self.s.T


@dataclass
class TrueModelSpec:
    """Generative model: constant loading matrices plus four latent blocks."""

    lambda1: np.ndarray
    lambda2: np.ndarray
    b: np.ndarray
    gamma: np.ndarray
    sde_xi: LatentSdeSpec
    sde_delta: LatentSdeSpec
    sde_eps: LatentSdeSpec
    sde_zeta: LatentSdeSpec

    def __post_init__(self):
        self.lambda1 = np.atleast_2d(np.asarray(self.lambda1, dtype=float))
        self.lambda2 = np.atleast_2d(np.asarray(self.lambda2, dtype=float))
        self.b = np.atleast_2d(np.asarray(self.b, dtype=float))
        self.gamma = np.atleast_2d(np.asarray(self.gamma, dtype=float))
        p1, k1 = self.lambda1.shape
        p2, k2 = self.lambda2.shape
        if self.b.shape != (k2, k2) or self.gamma.shape != (k2, k1):
            raise DimensionMismatch("b/gamma shapes disagree with loadings")
        if np.any(np.diagonal(self.b) != 0.0):
            raise ValueError("diagonal of b must be zero")
        dims = (self.sde_xi.dim, self.sde_delta.dim, self.sde_eps.dim, self.sde_zeta.dim)
        if dims != (k1, p1, p2, k2):
            raise DimensionMismatch(f"latent block dims {dims} disagree with loadings")
        for lam, name in ((self.lambda1, "lambda1"), (self.lambda2, "lambda2")):
            if np.linalg.matrix_rank(lam) < lam.shape[1]:
                raise ValueError(f"{name} must have full column rank")

    @property
    def p(self) -> int:
        return self.lambda1.shape[0] + self.lambda2.shape[0]


@dataclass(frozen=True)
class SimConfig:
    """Grid size n, horizon t_end and the master seed."""

    n: int
    t_end: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")


def _simulate_block(sde: LatentSdeSpec, n: int, h: float, rng: np.random.Generator) -> np.ndarray:
    d = sde.dim
    r = sde.s.shape[1]
    gauss = rng.standard_normal((n, r)) @ (sde.s.T * np.sqrt(h))
    counts = rng.poisson(sde.jump_rate * h, size=(n, d))
    # sum of c iid N(0, v) sizes equals N(0, c v); avoids ragged per-jump draws
    jumps = np.sqrt(counts * sde.jump_var) * rng.standard_normal((n, d))
    u = gauss + jumps + h * (sde.k @ sde.mu)
    a = np.eye(d) - h * sde.k
    return kernels.affine_recursion(a, u, sde.x0)


def simulate_latent(sde: LatentSdeSpec, cfg: SimConfig) -> np.ndarray:
    """One latent path on the (n+1)-point grid; deterministic given the seed."""
    h = cfg.t_end / cfg.n
    return _simulate_block(sde, cfg.n, h, np.random.default_rng(cfg.seed))


def simulate_observations(model: TrueModelSpec, cfg: SimConfig) -> PathData:
    """Observation path from the generative model.

    The four latent blocks use independent substreams spawned from the
    master seed in a fixed order (xi, delta, eps, zeta).
    """
    h = cfg.t_end / cfg.n
    streams = np.random.SeedSequence(cfg.seed).spawn(4)
    blocks = []
    for sde, stream in zip(
        (model.sde_xi, model.sde_delta, model.sde_eps, model.sde_zeta), streams
    ):
        blocks.append(_simulate_block(sde, cfg.n, h, np.random.default_rng(stream)))
    xi, delta, eps, zeta = blocks

    psi = np.eye(model.b.shape[0]) - model.b
    sv = np.linalg.svd(psi, compute_uv=False)
    if sv[-1] <= 1e-12 * max(1.0, sv[0]):
        raise SingularPsi("I - B is numerically singular")
    eta = np.linalg.solve(psi, (xi @ model.gamma.T + zeta).T).T

    x1 = xi @ model.lambda1.T + delta
    x2 = eta @ model.lambda2.T + eps
    return PathData(h, np.hstack([x1, x2]))


def true_sigma(model: TrueModelSpec) -> np.ndarray:
    """Exact observable volatility matrix implied by the generative model."""
    from .sem import _sigma_blocks

    return _sigma_blocks(
        model.lambda1,
        model.lambda2,
        model.b,
        model.gamma,
        model.sde_xi.volatility(),
        model.sde_delta.volatility(),
        model.sde_eps.volatility(),
        model.sde_zeta.volatility(),
    )


def reference_true_model() -> TrueModelSpec:
    """The 15-observable reference generative model used by the experiment.

    Five observables load on one factor, ten on two factors linked by a
    (0.7, -0.5) regression; every latent coordinate is a mean-reverting
    jump-diffusion with the constants tabulated below.
    """

    def ou(dim, rates, diffs, jump_rates, jump_vars, mu=None, x0=None):
        return LatentSdeSpec(
            dim=dim,
            k=np.diag(rates),
            mu=np.zeros(dim) if mu is None else np.asarray(mu, dtype=float),
            s=np.diag(diffs),
            jump_rate=np.asarray(jump_rates, dtype=float),
            jump_var=np.asarray(jump_vars, dtype=float),
            x0=np.zeros(dim) if x0 is None else np.asarray(x0, dtype=float),
        )

    sde_xi = ou(1, [2.0], [0.7], [2.0], [5.0], mu=[1.0], x0=[1.0])
    sde_delta = ou(
        5,
        [3.0, 2.0, 4.0, 5.0, 2.0],
        [0.9, 0.7, 0.5, 0.4, 0.8],
        [1.0] * 5,
        [5.0, 4.0, 6.0, 5.0, 4.0],
    )
    sde_eps = ou(
        10,
        [2.0, 3.0, 2.0, 5.0, 4.0, 2.0, 3.0, 2.0, 5.0, 4.0],
        [0.4, 0.9, 0.3, 0.6, 0.4, 0.5, 0.8, 0.6, 0.7, 0.3],
        [1.0] * 10,
        [5.0, 4.0, 4.0, 5.0, 6.0, 4.0, 6.0, 5.0, 6.0, 5.0],
    )
    sde_zeta = ou(2, [5.0, 2.0], [0.5, 0.8], [1.0, 1.0], [6.0, 5.0])

    lambda1 = np.array([[1.0, 0.2, 0.4, 0.1, 0.7]]).T
    lambda2 = np.array(
        [
            [1.0, 0.2, 0.9, 1.2, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.6, 0.4, 0.7],
        ]
    ).T
    gamma = np.array([[0.7], [-0.5]])
    b = np.zeros((2, 2))
    return TrueModelSpec(lambda1, lambda2, b, gamma, sde_xi, sde_delta, sde_eps, sde_zeta)
