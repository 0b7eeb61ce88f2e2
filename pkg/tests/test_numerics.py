import numpy as np
import pytest

from gridfr import (ConfigError, NumericalError, band_kept_count,
                    band_kept_fraction, band_mask, condition_number,
                    default_band, density_weights, jittered_grid,
                    pseudo_inverse)
from gridfr.raster import Raster


def test_pinv_identity():
    p, info = pseudo_inverse(np.eye(4))
    np.testing.assert_allclose(p, np.eye(4), atol=1e-14)
    assert info.rank == 4


def test_pinv_rank_deficient_diagonal():
    p, info = pseudo_inverse(np.diag([2.0, 0.0]))
    np.testing.assert_allclose(p, np.diag([0.5, 0.0]), atol=1e-14)
    assert info.rank == 1


def test_pinv_full_rank_rectangular():
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(2)))
    a = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    p, _ = pseudo_inverse(a)
    assert np.linalg.norm(a @ p @ a - a) / np.linalg.norm(a) < 1e-12


def test_moore_penrose_identities_50_random():
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(4)))
    for _ in range(50):
        m = int(rng.integers(2, 65))
        n = int(rng.integers(2, 65))
        a = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
        if rng.uniform() < 0.3:     # throw in rank-deficient cases
            k = max(1, min(m, n) // 2)
            a = a[:, :k] @ rng.normal(size=(k, n))
        p, _ = pseudo_inverse(a)
        na = np.linalg.norm(a)
        assert np.linalg.norm(a @ p @ a - a) / na < 1e-10
        assert np.linalg.norm(p @ a @ p - p) / max(np.linalg.norm(p), 1e-300) < 1e-10
        assert np.linalg.norm((a @ p).conj().T - a @ p) / max(np.linalg.norm(a @ p), 1e-300) < 1e-10
        assert np.linalg.norm((p @ a).conj().T - p @ a) / max(np.linalg.norm(p @ a), 1e-300) < 1e-10


def test_pinv_zero_matrix():
    with pytest.raises(NumericalError):
        pseudo_inverse(np.zeros((3, 3)))


def test_band_mask_diagonal_only():
    a = np.arange(16.0).reshape(4, 4)
    np.testing.assert_array_equal(band_mask(a, 1), np.diag(np.diag(a)))


def test_band_mask_full_width_unchanged():
    a = np.arange(9.0).reshape(3, 3)
    np.testing.assert_array_equal(band_mask(a, 3), a)


def test_band_mask_tridiagonal_ones():
    got = band_mask(np.ones((3, 3)), 2)
    assert got.sum() == 7
    assert got[0, 2] == 0 and got[2, 0] == 0


def test_band_mask_idempotent_monotone():
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(6)))
    a = rng.normal(size=(9, 9))
    for r in (1, 3, 5):
        m = band_mask(a, r)
        np.testing.assert_array_equal(band_mask(m, r), m)
        wider = band_mask(a, r + 2)
        assert set(zip(*np.nonzero(m))) <= set(zip(*np.nonzero(wider)))


def test_band_mask_validation():
    with pytest.raises(ConfigError):
        band_mask(np.ones((2, 3)), 1)
    with pytest.raises(ConfigError):
        band_mask(np.ones((3, 3)), 4)


def test_band_kept_formula_matches_count():
    for n, r in ((3, 2), (10, 4), (900, 8), (221, 12)):
        mask = band_mask(np.ones((min(n, 64), min(n, 64)), dtype=float),
                         min(r, min(n, 64)))
        if n <= 64:
            assert band_kept_count(n, r) == int(mask.sum())
    assert band_kept_count(3, 2) == 7
    assert band_kept_fraction(900, 8) == pytest.approx(0.0165975, abs=1e-7)


def test_default_band_heuristic():
    # 1D raster of 2N+1 points, N=16: ceil(log 33) = 4
    assert default_band(33) == 4
    assert default_band(17) == 3
    assert default_band(2) == 1


def test_condition_number_basics():
    k, _ = condition_number(np.eye(5))
    assert k == pytest.approx(1.0)
    k, _ = condition_number(np.diag([10.0, 1.0]))
    assert k == pytest.approx(10.0)
    with pytest.raises(NumericalError):
        condition_number(np.zeros((2, 2)))


def test_density_weights_uniform_interior():
    r = Raster(dim=1, points=np.arange(-4, 5, dtype=float))
    w = density_weights(r)
    np.testing.assert_allclose(w[1:-1], 1.0, atol=1e-14)
    np.testing.assert_allclose(w[[0, -1]], 0.5, atol=1e-14)


def test_density_weights_trapezoid_example():
    r = Raster(dim=1, points=np.array([0.0, 1.0, 3.0]))
    np.testing.assert_allclose(density_weights(r), [0.5, 1.5, 1.0], atol=1e-14)


def test_density_weights_unsorted_input_order_preserved():
    r = Raster(dim=1, points=np.array([3.0, 0.0, 1.0]))
    np.testing.assert_allclose(density_weights(r), [1.0, 0.5, 1.5], atol=1e-14)


def test_density_weights_jittered_bounds():
    r = jittered_grid(16, 0.25, 8)
    w = density_weights(r)
    assert np.all(w[1:-1] >= 0.5 - 1e-12) and np.all(w[1:-1] <= 1.5 + 1e-12)
    assert np.all(w[[0, -1]] >= 0.25 - 1e-12)


def test_density_weights_2d_grid_product():
    r = jittered_grid((3, 3), 0.0, 0)
    w = density_weights(r)
    # zero jitter: interior cells get 1, edges 1/2, corners 1/4
    w = w.reshape(7, 7)
    assert w[3, 3] == pytest.approx(1.0)
    assert w[0, 3] == pytest.approx(0.5)
    assert w[0, 0] == pytest.approx(0.25)


def test_density_weights_unstructured_cell_share():
    pts = np.array([[0.0, 0.0], [0.1, -0.1], [2.0, 2.0]])
    r = Raster(dim=2, points=pts)
    w = density_weights(r)
    np.testing.assert_allclose(w, [0.5, 0.5, 1.0])
