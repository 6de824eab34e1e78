"""hv-block cross-validation for the local-linear bandwidth.

For every validation center t the fit at t/T is recomputed with the block
{t - v_block - h_gap, ..., t + v_block + h_gap} deleted, so neighbours that
are serially correlated with Y_t cannot leak into its prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .averages import as_values
from .errors import InfeasibleBandwidthError, NoFeasibleBandwidthError
from .kernels import EPANECHNIKOV, KernelSpec, get_kernel
from .local_linear import DET_TOL

__all__ = [
    "CvConfig",
    "CvResult",
    "default_h_grid",
    "default_gap",
    "cv_score",
    "cv_scores",
    "select_bandwidth",
]


def default_h_grid(T: int, n: int = 20, upper: float = 0.45) -> np.ndarray:
    lower = 0.5 * (math.log(T) / T) ** 0.2
    return np.geomspace(lower, upper, n)


def default_gap(T: int, h: float) -> int:
    """Flanking gap sized to the error dependence, not to the kernel reach.

    A gap of ceil(T*h) would delete the whole Epanechnikov window, so the
    gap grows like T**(1/3) and stays independent of the candidate ``h``.
    """
    return math.ceil(T ** (1.0 / 3.0))


@dataclass(frozen=True)
class CvConfig:
    """hv-block settings.

    ``v_block`` and ``h_gap`` are half-widths in observations.  ``None``
    selects the defaults: v_block = ceil(0.02 T) and h_gap from
    :func:`default_gap`.
    """

    h_grid: tuple | None = None
    v_block: int | None = None
    h_gap: int | None = None
    subsample_stride: int = 1

    def __post_init__(self):
        if self.h_grid is not None:
            g = tuple(float(h) for h in np.atleast_1d(self.h_grid))
            if any(not 0 < h < 0.5 for h in g):
                raise ValueError("candidate bandwidths must lie in (0, 1/2)")
            if list(g) != sorted(g):
                raise ValueError("h_grid must be sorted ascending")
            object.__setattr__(self, "h_grid", g)
        if self.v_block is not None and self.v_block < 0:
            raise ValueError("v_block must be nonnegative")
        if self.h_gap is not None and self.h_gap < 0:
            raise ValueError("h_gap must be nonnegative")
        if self.subsample_stride < 1:
            raise ValueError("subsample_stride must be positive")

    def grid_for(self, T: int) -> np.ndarray:
        return default_h_grid(T) if self.h_grid is None else np.asarray(self.h_grid)

    def block_for(self, T: int) -> int:
        return math.ceil(0.02 * T) if self.v_block is None else int(self.v_block)

    def gap_for(self, T: int, h: float) -> int:
        return default_gap(T, h) if self.h_gap is None else int(self.h_gap)


def _center_errors(y, spec, h, removed, stride, chunk=256):
    """Squared block-deleted prediction errors; nan where the window emptied."""
    T = y.size
    centers = np.arange(1, T + 1, stride)
    out = np.full(centers.size, np.nan)
    reach = h * T
    for start in range(0, centers.size, chunk):
        c = centers[start:start + chunk]
        lo = max(1, math.floor(c.min() - reach) - 1)
        hi = min(T, math.ceil(c.max() + reach) + 1)
        idx = np.arange(lo, hi + 1)
        u = (idx - c[:, None]) / (T * h)
        k = spec(u)
        k[np.abs(idx - c[:, None]) <= removed] = 0.0
        ku = k * u
        s0, s1, s2 = k.sum(1), ku.sum(1), (ku * u).sum(1)
        yb = y[lo - 1:hi]
        d0, d1 = k @ yb, ku @ yb
        # sums above omit the common factor 1/(T h); restore it for the determinant guard
        scale = 1.0 / (T * h)
        det = (s0 * s2 - s1 * s1) * scale * scale
        ok = det >= DET_TOL
        pred = (s2 * d0 - s1 * d1) / np.where(ok, s0 * s2 - s1 * s1, 1.0)
        err = (y[c - 1] - pred) ** 2
        out[start:start + chunk] = np.where(ok, err, np.nan)
    return out


def cv_score(series, spec: KernelSpec = EPANECHNIKOV, h: float = 0.1, cfg: CvConfig | None = None) -> float:
    """Mean squared hv-block prediction error at bandwidth ``h``.

    Raises
    ------
    InfeasibleBandwidthError
        If more than half of the validation centers lose their kernel window.
    """
    cfg = CvConfig() if cfg is None else cfg
    y = as_values(series)
    T = y.size
    removed = cfg.block_for(T) + cfg.gap_for(T, h)
    if 2 * removed + 1 >= T:
        raise ValueError(f"deleted block of {2 * removed + 1} observations does not fit in T={T}")
    err = _center_errors(y, get_kernel(spec), float(h), removed, cfg.subsample_stride)
    skipped = int(np.isnan(err).sum())
    if skipped > 0.5 * err.size:
        raise InfeasibleBandwidthError(
            f"h={h:.4g}: {skipped} of {err.size} validation centers have no usable kernel window"
        )
    return float(np.nanmean(err))


@dataclass
class CvResult:
    h_grid: np.ndarray
    scores: np.ndarray  # nan marks an infeasible candidate
    h: float

    @property
    def best_score(self) -> float:
        return float(np.nanmin(self.scores))


def cv_scores(series, spec: KernelSpec = EPANECHNIKOV, cfg: CvConfig | None = None) -> CvResult:
    """Score every candidate; ties go to the larger bandwidth."""
    cfg = CvConfig() if cfg is None else cfg
    y = as_values(series)
    grid = cfg.grid_for(y.size)
    scores = np.full(grid.size, np.nan)
    for i, h in enumerate(grid):
        try:
            scores[i] = cv_score(y, spec, h, cfg)
        except InfeasibleBandwidthError:
            pass
    if np.all(np.isnan(scores)):
        raise NoFeasibleBandwidthError("no candidate bandwidth is feasible for this hv-block design")
    best = np.nanmin(scores)
    pick = np.flatnonzero(scores == best)[-1]
    return CvResult(h_grid=grid, scores=scores, h=float(grid[pick]))


def select_bandwidth(series, spec: KernelSpec = EPANECHNIKOV, cfg: CvConfig | None = None) -> float:
    return cv_scores(series, spec, cfg).h
