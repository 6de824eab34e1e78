"""Local-linear trend estimator g_hat(x) = e1' S_{T,x}^{-1} D_{T,x}."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .averages import as_values, check_bandwidth, kernel_sums
from .errors import InvalidBandwidthError, SingularDesignError
from .kernels import EPANECHNIKOV, KernelSpec, get_kernel

__all__ = [
    "CurveEstimate",
    "fit_local_linear",
    "weights",
    "eigen_floor",
    "DET_TOL",
]

DET_TOL = 1e-12


@dataclass
class CurveEstimate:
    """Fitted curve on an evaluation grid.

    ``lambda_floor`` is the smallest eigenvalue of the moment matrix over the
    grid for local-linear fits, and ``nan`` for estimators without one.
    """

    grid: np.ndarray
    values: np.ndarray
    bandwidth: float
    lambda_floor: float = float("nan")
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values must have the same length")

    def __call__(self, x):
        """Nearest-grid-point lookup (no interpolation)."""
        pos = np.searchsorted(self.grid, x)
        pos = np.clip(pos, 0, self.grid.size - 1)
        left = np.clip(pos - 1, 0, self.grid.size - 1)
        closer_left = np.abs(self.grid[left] - x) <= np.abs(self.grid[pos] - x)
        return self.values[np.where(closer_left, left, pos)]


def _check_fit_args(T: int, h: float) -> float:
    h = check_bandwidth(h)
    if T * h <= 2:
        raise InvalidBandwidthError(f"need T*h > 2 for a local-linear fit, got T*h={T * h:.3g}")
    return h


def _solve(s0, s1, s2, d0, d1, x):
    det = s0 * s2 - s1 * s1
    bad = ~(det >= DET_TOL)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise SingularDesignError(np.atleast_1d(x)[k], np.atleast_1d(det)[k])
    return (s2 * d0 - s1 * d1) / det


def _lambda_min(s0, s1, s2):
    return 0.5 * (s0 + s2) - np.hypot(0.5 * (s0 - s2), s1)


def fit_local_linear(series, spec: KernelSpec = EPANECHNIKOV, h: float = 0.1, grid=None) -> CurveEstimate:
    """Local-linear fit of a design series.

    Parameters
    ----------
    series : DesignSeries or array_like
        Responses Y_t observed at t/T.
    spec : KernelSpec
        Smoothing kernel K.
    h : float
        Bandwidth in (0, 1/2) with T*h > 2.
    grid : array_like, optional
        Evaluation points in [0, 1]; defaults to the design points t/T.

    Raises
    ------
    SingularDesignError
        If det S_{T,x} < 1e-12 at some grid point.
    """
    y = as_values(series)
    T = y.size
    h = _check_fit_args(T, h)
    spec = get_kernel(spec)
    grid = np.arange(1, T + 1) / T if grid is None else np.asarray(grid, dtype=float)
    if grid.size and (grid.min() < 0 or grid.max() > 1):
        raise ValueError("evaluation grid must lie in [0, 1]")
    sums = kernel_sums(np.vstack([np.ones(T), y]), grid, h, spec, powers=(0, 1, 2))
    s0, s1, s2 = sums[:, 0, 0], sums[:, 0, 1], sums[:, 0, 2]
    d0, d1 = sums[:, 1, 0], sums[:, 1, 1]
    values = _solve(s0, s1, s2, d0, d1, grid)
    floor = float(np.min(_lambda_min(s0, s1, s2))) if grid.size else float("nan")
    return CurveEstimate(grid=grid, values=values, bandwidth=h, lambda_floor=floor)


def weights(spec: KernelSpec, T: int, x: float, h: float) -> np.ndarray:
    """Equivalent-kernel weights W_t(x), t = 1..T, so that g_hat(x) = Σ W_t Y_t."""
    T = int(T)
    h = _check_fit_args(T, h)
    spec = get_kernel(spec)
    s0, s1, s2 = kernel_sums(np.ones(T), [x], h, spec, powers=(0, 1, 2))[0, 0]
    det = s0 * s2 - s1 * s1
    if not det >= DET_TOL:
        raise SingularDesignError(x, det)
    u = (np.arange(1, T + 1) / T - x) / h
    return (s2 - s1 * u) / det * spec(u) / (h * T)


def eigen_floor(spec: KernelSpec, T: int, h: float, grid=None) -> float:
    """min over the grid of the smallest eigenvalue of S_{T,x}."""
    T = int(T)
    h = check_bandwidth(h)
    grid = np.arange(1, T + 1) / T if grid is None else np.asarray(grid, dtype=float)
    s = kernel_sums(np.ones(T), grid, h, get_kernel(spec), powers=(0, 1, 2))[:, 0]
    return float(np.min(_lambda_min(s[:, 0], s[:, 1], s[:, 2])))
