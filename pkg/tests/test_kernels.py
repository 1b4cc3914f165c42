import numpy as np
import pytest

from semjd import _kernels_nb, _kernels_np, kernels


def test_backend_reported():
    assert kernels.backend() in ("numba", "numpy")


@pytest.mark.parametrize("diagonal", [True, False])
def test_affine_recursion_backend_parity(diagonal):
    rng = np.random.default_rng(0)
    d, n = 4, 300
    if diagonal:
        a = np.diag(1.0 - 0.01 * rng.uniform(1.0, 5.0, size=d))
    else:
        a = np.eye(d) - 0.01 * rng.uniform(-1.0, 1.0, size=(d, d))
    u = rng.standard_normal((n, d)) * 0.1
    x0 = rng.standard_normal(d)
    out_nb = _kernels_nb.affine_recursion(a, u, x0)
    out_np = _kernels_np.affine_recursion(a, u, x0)
    assert out_nb.shape == (n + 1, d)
    assert np.max(np.abs(out_nb - out_np)) <= 1e-12


def test_truncated_second_moments_backend_parity():
    rng = np.random.default_rng(1)
    dx = rng.standard_normal((500, 6)) * 0.3
    dx[13] *= 40.0
    thr = 1.0
    keep_nb, kept_nb, acc_nb = _kernels_nb.truncated_second_moments(dx, thr)
    keep_np, kept_np, acc_np = _kernels_np.truncated_second_moments(dx, thr)
    assert kept_nb == kept_np
    assert np.array_equal(np.asarray(keep_nb), keep_np)
    assert np.max(np.abs(acc_nb - acc_np)) <= 1e-12 * max(1.0, np.max(np.abs(acc_np)))


def test_truncated_second_moments_boundary_and_psd():
    dx = np.zeros((3, 2))
    dx[0, 0] = 1.0  # norm exactly at the threshold: kept
    dx[1, 1] = 1.0 + 1e-12
    for impl in (_kernels_nb, _kernels_np):
        keep, kept, acc = impl.truncated_second_moments(dx, 1.0)
        assert list(keep) == [True, False, True]
        assert kept == 2
        assert np.array_equal(acc, acc.T)
        assert np.linalg.eigvalsh(acc).min() >= 0.0


def test_affine_recursion_matches_naive_loop():
    rng = np.random.default_rng(2)
    d, n = 3, 50
    a = rng.uniform(-0.2, 0.2, size=(d, d)) + np.eye(d)
    u = rng.standard_normal((n, d))
    x0 = rng.standard_normal(d)
    expected = np.empty((n + 1, d))
    expected[0] = x0
    for i in range(n):
        expected[i + 1] = a @ expected[i] + u[i]
    for impl in (_kernels_nb, _kernels_np):
        out = impl.affine_recursion(a, u, x0)
        assert np.max(np.abs(out - expected)) <= 1e-10
