import dataclasses

import numpy as np
import pytest

from semjd import (
    DimensionMismatch,
    LatentSdeSpec,
    SimConfig,
    TruncationRule,
    simulate_latent,
    simulate_observations,
    true_sigma,
    truncation_stats,
)
from semjd.simulate import reference_true_model

from helpers import hand_built_sigma0


def _ou1(rate=2.0, diff=0.5, lam=0.0, var=1.0, mu=0.0, x0=0.0):
    return LatentSdeSpec(
        dim=1, k=[[rate]], mu=[mu], s=[[diff]], jump_rate=[lam], jump_var=[var], x0=[x0]
    )


def _no_jumps(model):
    def strip(sde):
        return dataclasses.replace(sde, jump_rate=np.zeros(sde.dim))

    return dataclasses.replace(
        model,
        sde_xi=strip(model.sde_xi),
        sde_delta=strip(model.sde_delta),
        sde_eps=strip(model.sde_eps),
        sde_zeta=strip(model.sde_zeta),
    )


class TestSimulateLatent:
    def test_deterministic_given_seed(self):
        sde = _ou1(lam=1.0, var=2.0)
        cfg = SimConfig(n=500, t_end=1.0, seed=123)
        a = simulate_latent(sde, cfg)
        b = simulate_latent(sde, cfg)
        assert np.array_equal(a, b)
        c = simulate_latent(sde, SimConfig(n=500, t_end=1.0, seed=124))
        assert not np.array_equal(a, c)

    def test_drift_fixed_point_constant(self):
        sde = _ou1(rate=3.0, diff=0.0, lam=0.0, mu=1.7, x0=1.7)
        path = simulate_latent(sde, SimConfig(n=200, t_end=1.0, seed=0))
        assert np.array_equal(path, np.full((201, 1), 1.7))

    def test_initial_value(self):
        sde = _ou1(x0=2.5)
        path = simulate_latent(sde, SimConfig(n=50, t_end=1.0, seed=1))
        assert path[0, 0] == 2.5

    def test_jump_count_monte_carlo(self):
        # frozen drift/diffusion: steps move only on jumps, so nonzero
        # increments count jump events; their mean over seeds estimates
        # rate * t_end = 2
        sde = _ou1(rate=0.0, diff=0.0, lam=2.0, var=5.0)
        counts = [
            np.count_nonzero(
                np.diff(simulate_latent(sde, SimConfig(n=500, t_end=1.0, seed=s))[:, 0])
            )
            for s in range(10_000)
        ]
        assert abs(float(np.mean(counts)) - 2.0) <= 0.05

    def test_validation(self):
        with pytest.raises(ValueError):
            _ou1(lam=-1.0)
        with pytest.raises(ValueError):
            LatentSdeSpec(
                dim=1, k=[[1.0]], mu=[0.0], s=[[1.0]], jump_rate=[1.0], jump_var=[0.0], x0=[0.0]
            )
        with pytest.raises(DimensionMismatch):
            LatentSdeSpec(
                dim=2, k=[[1.0]], mu=[0.0], s=[[1.0]], jump_rate=[1.0], jump_var=[1.0], x0=[0.0]
            )


class TestReferenceModel:
    def test_dimensions_and_constants(self, true_model):
        assert true_model.p == 15
        assert np.array_equal(true_model.lambda1[:, 0], [1.0, 0.2, 0.4, 0.1, 0.7])
        assert np.array_equal(true_model.gamma, [[0.7], [-0.5]])
        assert np.all(true_model.b == 0.0)
        # first error coordinate: rate 3, diffusion 0.9
        assert true_model.sde_delta.k[0, 0] == 3.0
        assert true_model.sde_delta.s[0, 0] == 0.9
        # factor block: rate 2 toward mean 1, diffusion 0.7, jumps at rate 2
        assert true_model.sde_xi.k[0, 0] == 2.0
        assert true_model.sde_xi.mu[0] == 1.0
        assert true_model.sde_xi.jump_rate[0] == 2.0
        assert true_model.sde_xi.jump_var[0] == 5.0
        assert true_model.sde_xi.volatility()[0, 0] == pytest.approx(0.49)

    def test_true_sigma_matches_hand_built(self, true_model):
        assert np.max(np.abs(true_sigma(true_model) - hand_built_sigma0())) <= 1e-12


class TestSimulateObservations:
    def test_shape(self, path_5e4):
        assert path_5e4.x.shape == (50_001, 15)
        assert path_5e4.p == 15
        assert path_5e4.h == pytest.approx(1.0 / 50_000)

    def test_deterministic(self, true_model):
        cfg = SimConfig(n=300, t_end=1.0, seed=9)
        a = simulate_observations(true_model, cfg)
        b = simulate_observations(true_model, cfg)
        assert np.array_equal(a.x, b.x)

    def test_all_frozen_constant(self, true_model):
        def freeze(sde):
            return dataclasses.replace(
                sde,
                s=np.zeros_like(sde.s),
                jump_rate=np.zeros(sde.dim),
                mu=sde.x0.copy(),
            )

        frozen = dataclasses.replace(
            true_model,
            sde_xi=freeze(true_model.sde_xi),
            sde_delta=freeze(true_model.sde_delta),
            sde_eps=freeze(true_model.sde_eps),
            sde_zeta=freeze(true_model.sde_zeta),
        )
        path = simulate_observations(frozen, SimConfig(n=100, t_end=1.0, seed=4))
        assert np.all(path.increments() == 0.0)

    def test_factor_regression_identity(self, true_model):
        # freeze both error blocks and the regression disturbance; then
        # x2 rows must equal lambda2 @ (gamma @ xi + zeta0) exactly
        def freeze(sde):
            return dataclasses.replace(
                sde, s=np.zeros_like(sde.s), jump_rate=np.zeros(sde.dim), mu=sde.x0.copy()
            )

        model = dataclasses.replace(
            true_model,
            sde_delta=freeze(true_model.sde_delta),
            sde_eps=freeze(true_model.sde_eps),
            sde_zeta=dataclasses.replace(
                freeze(true_model.sde_zeta), x0=np.array([0.3, -0.2]), mu=np.array([0.3, -0.2])
            ),
        )
        path = simulate_observations(model, SimConfig(n=200, t_end=1.0, seed=6))
        x1 = path.x[:, :5]
        x2 = path.x[:, 5:]
        xi = np.linalg.lstsq(model.lambda1, x1.T, rcond=None)[0].T
        eta = model.gamma @ xi.T + np.array([[0.3], [-0.2]])
        assert np.max(np.abs(x2 - (model.lambda2 @ eta).T)) <= 1e-10

    def test_realized_cov_approaches_true_sigma(self, true_model):
        quiet = _no_jumps(true_model)
        target = true_sigma(quiet)
        rels = []
        for seed in range(10):
            path = simulate_observations(quiet, SimConfig(n=100_000, t_end=1.0, seed=seed))
            stats = truncation_stats(path, TruncationRule(d=1e9, rho=0.4))
            rels.append(np.linalg.norm(stats.realized_cov - target) / np.linalg.norm(target))
        assert float(np.median(rels)) <= 0.05

    def test_kept_fraction_with_jumps(self, true_model):
        path = simulate_observations(true_model, SimConfig(n=100_000, t_end=1.0, seed=31))
        stats = truncation_stats(path, TruncationRule(d=10.0, rho=0.4))
        assert stats.n_kept / path.n >= 0.99

    def test_substreams_isolated(self, true_model):
        # changing the regression-disturbance block must not perturb the
        # first observable group (driven by the factor and error blocks)
        cfg = SimConfig(n=400, t_end=1.0, seed=77)
        base = simulate_observations(true_model, cfg)
        changed = dataclasses.replace(
            true_model,
            sde_zeta=dataclasses.replace(true_model.sde_zeta, s=np.diag([5.0, 5.0])),
        )
        other = simulate_observations(changed, cfg)
        assert np.array_equal(base.x[:, :5], other.x[:, :5])
        assert not np.array_equal(base.x[:, 5:], other.x[:, 5:])
