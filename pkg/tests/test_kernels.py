"""Backend parity: the numba kernels and the numpy fallbacks must agree."""

import numpy as np
import pytest

from planesep import kernels


@pytest.fixture
def both_backends():
    names = kernels.available_backends()
    if len(names) < 2:
        pytest.skip("only one backend available")
    return names


def test_env_default_backend_is_valid():
    assert kernels.backend_name() in kernels.available_backends()


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_backend_switch_round_trip():
    before = kernels.backend_name()
    try:
        for name in kernels.available_backends():
            kernels.set_backend(name)
            assert kernels.backend_name() == name
    finally:
        kernels.set_backend(before)


@pytest.mark.parametrize("seed", range(5))
def test_residual_kernels_agree(both_backends, seed):
    rng = np.random.default_rng(seed)
    q, n, m = int(rng.integers(1, 30)), int(rng.integers(1, 20)), int(rng.integers(1, 50))
    planes = rng.standard_normal((q, n))
    p = rng.standard_normal(n)
    pts = rng.standard_normal((m, n))
    before = kernels.backend_name()
    try:
        results_point, results_plane = [], []
        for name in both_backends:
            kernels.set_backend(name)
            results_point.append(kernels.residuals_point(planes, p))
            results_plane.append(kernels.residuals_plane(pts, planes[0]))
        assert np.allclose(results_point[0], results_point[1], rtol=1e-12, atol=1e-12)
        assert np.allclose(results_plane[0], results_plane[1], rtol=1e-12, atol=1e-12)
    finally:
        kernels.set_backend(before)


@pytest.mark.parametrize("seed", range(8))
def test_gauss_kernels_agree(both_backends, seed):
    rng = np.random.default_rng(100 + seed)
    k = int(rng.integers(1, 9))
    n = int(rng.integers(k, 12))
    m = rng.uniform(-5.0, 5.0, size=(k, n))
    if seed % 3 == 0 and k >= 2:
        m[-1] = m[0]  # duplicate row: rank deficiency
    rhs = np.full(k, -1.0)
    free = rng.uniform(-1.0, 1.0, size=n)
    before = kernels.backend_name()
    try:
        out = []
        for name in both_backends:
            kernels.set_backend(name)
            out.append(kernels.gauss_solve(m, rhs, free, 1e-10, 1e-8))
        (a1, s1, r1, m1, ad1), (a2, s2, r2, m2, ad2) = out
        assert s1 == s2
        assert r1 == r2
        assert m1 == m2, "operation counts must not depend on the backend"
        assert ad1 == ad2
        if s1 == kernels.GAUSS_OK:
            assert np.allclose(a1, a2, rtol=1e-9, atol=1e-9)
            assert np.allclose(m @ a1, rhs, atol=1e-7)
    finally:
        kernels.set_backend(before)


def test_gauss_detects_inconsistency_on_scaled_rows():
    m = np.array([[1.0, 1.0], [2.0, 2.0]])
    _, status, rank, _, _ = kernels.gauss_solve(
        m, np.full(2, -1.0), np.zeros(2), 1e-10, 1e-8
    )
    assert status == kernels.GAUSS_INCONSISTENT
    assert rank == 1


def test_gauss_zero_matrix_is_inconsistent_for_unit_rhs():
    m = np.zeros((2, 3))
    _, status, rank, _, _ = kernels.gauss_solve(
        m, np.full(2, -1.0), np.zeros(3), 1e-10, 1e-8
    )
    assert status == kernels.GAUSS_INCONSISTENT
    assert rank == 0


def test_gauss_full_rank_square_matches_numpy_solve():
    rng = np.random.default_rng(3)
    for _ in range(5):
        n = int(rng.integers(2, 10))
        m = rng.standard_normal((n, n)) + np.eye(n)
        rhs = np.full(n, -1.0)
        alpha, status, rank, mults, adds = kernels.gauss_solve(
            m, rhs, np.zeros(n), 1e-10, 1e-8
        )
        assert status == kernels.GAUSS_OK
        assert rank == n
        assert np.allclose(alpha, np.linalg.solve(m, rhs))
        # elimination plus back-substitution stays within the n^3 ballpark
        assert mults <= n**3 + n**2


def test_residuals_point_empty_family():
    out = kernels.residuals_point(np.empty((0, 4)), np.zeros(4))
    assert out.shape == (0,)
