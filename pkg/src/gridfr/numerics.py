"""Dense linear-algebra kernel: truncated pseudo-inverse, band masking,
condition numbers, and density-compensation quadrature weights.

Matrices are plain complex numpy arrays throughout; SVD work is
delegated to numpy's LAPACK bindings.  The pseudo-inverse treats
singular values below ``rtol * sigma_max`` as zero; the default
threshold is ``1e-10 * max(rows, cols)`` and every factorization
reports its retained rank and condition number so ill-conditioning is
visible instead of silent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .raster import Raster


def default_rtol(shape) -> float:
    return 1e-10 * max(shape)


@dataclass(frozen=True)
class PinvInfo:
    """Spectrum bookkeeping for one truncated pseudo-inversion."""

    rank: int
    sigma_max: float
    sigma_min_kept: float

    @property
    def kappa(self) -> float:
        return self.sigma_max / self.sigma_min_kept


def pseudo_inverse(a: np.ndarray, rtol: float | None = None):
    """Moore-Penrose pseudo-inverse via SVD with relative truncation.

    Returns ``(pinv, info)``.  Rank deficiency is handled by zeroing
    singular values below rtol*sigma_max; an identically zero matrix is
    a NumericalError (rank collapse).
    """
    a = np.asarray(a)
    if a.ndim != 2:
        raise ConfigError("pseudo_inverse expects a matrix")
    if not np.all(np.isfinite(a)):
        raise ConfigError("non-finite matrix entries")
    if rtol is None:
        rtol = default_rtol(a.shape)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise NumericalError("zero matrix has no retained spectrum")
    keep = s > rtol * s[0]
    rank = int(np.count_nonzero(keep))
    if rank == 0:
        raise NumericalError("rank collapse: no singular value above threshold")
    pinv = (vh[:rank].conj().T * (1.0 / s[:rank])) @ u[:, :rank].conj().T
    return pinv, PinvInfo(rank=rank, sigma_max=float(s[0]),
                          sigma_min_kept=float(s[rank - 1]))


def band_mask(a: np.ndarray, r: int) -> np.ndarray:
    """Zero everything outside the band |i-j| <= r-1 (width 2r-1)."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError("band_mask expects a square matrix")
    n = a.shape[0]
    if not 1 <= r <= n:
        raise ConfigError(f"band half-width r={r} outside [1, {n}]")
    idx = np.arange(n)
    return a * (np.abs(idx[:, None] - idx[None, :]) <= r - 1)


def band_kept_count(order: int, r: int) -> int:
    """Number of entries inside a 2r-1 band of an order-n matrix."""
    return (2 * r - 1) * order - r * (r - 1)


def band_kept_fraction(order: int, r: int) -> float:
    return band_kept_count(order, r) / float(order * order)


def default_band(order: int) -> int:
    """Band half-width heuristic r ~ log(system order), at least 1.

    For a 1D raster of 2N+1 points this is ceil(log(2N+1)); e.g. N=16
    gives r=4 (band 7).
    """
    r = int(np.ceil(np.log(order)))
    return min(max(r, 1), order)


def condition_number(a: np.ndarray, rtol: float | None = None):
    """2-norm condition of the rank-truncated operator.

    Returns ``(kappa, info)`` where kappa is the ratio of the largest
    to the smallest retained singular value.
    """
    a = np.asarray(a)
    if not np.any(a):
        raise NumericalError("condition number of a zero matrix")
    if rtol is None:
        rtol = default_rtol(a.shape)
    s = np.linalg.svd(a, compute_uv=False)
    keep = s > rtol * s[0]
    rank = int(np.count_nonzero(keep))
    info = PinvInfo(rank=rank, sigma_max=float(s[0]),
                    sigma_min_kept=float(s[rank - 1]))
    return info.kappa, info


def _trapezoid_1d(sorted_coords: np.ndarray) -> np.ndarray:
    n = len(sorted_coords)
    if n == 1:
        return np.array([1.0])
    w = np.empty(n)
    w[1:-1] = (sorted_coords[2:] - sorted_coords[:-2]) / 2.0
    w[0] = (sorted_coords[1] - sorted_coords[0]) / 2.0
    w[-1] = (sorted_coords[-1] - sorted_coords[-2]) / 2.0
    return w


def density_weights(raster: Raster) -> np.ndarray:
    """Quadrature weights compensating for non-uniform sample density.

    1D: trapezoidal weights on the sorted raster, one-sided half gaps
    at the two ends.  2D grid-indexed rasters: product of per-axis
    trapezoid weights taken along each grid line.  2D unstructured
    rasters: each point gets an equal share of its nearest unit cell
    (cell area 1 split among the points rounding into that cell).
    """
    if raster.dim == 1:
        order = np.argsort(raster.points)
        w = np.empty(len(raster))
        w[order] = _trapezoid_1d(raster.points[order])
        return w

    if raster.kind == "jittered_grid" and raster.index_extents is not None:
        (lo1, hi1), (lo2, hi2) = raster.index_extents
        n1, n2 = hi1 - lo1 + 1, hi2 - lo2 + 1
        x = raster.points[:, 0].reshape(n1, n2)
        y = raster.points[:, 1].reshape(n1, n2)
        w1 = np.empty_like(x)
        w2 = np.empty_like(y)
        for j in range(n2):
            w1[:, j] = _trapezoid_1d(x[:, j])
        for i in range(n1):
            w2[i, :] = _trapezoid_1d(y[i, :])
        return (w1 * w2).ravel()

    cells = np.round(raster.points).astype(int)
    _, inverse, counts = np.unique(cells, axis=0, return_inverse=True,
                                   return_counts=True)
    return 1.0 / counts[inverse]


def save_magnitude_csv(a: np.ndarray, path) -> None:
    """Dump |entries| row per matrix row (Fig.-style intensity source)."""
    np.savetxt(path, np.abs(np.asarray(a)), delimiter=",", fmt="%.8e")
