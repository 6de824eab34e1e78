"""Fixed-design kernel averages on the grid x_i = i/T.

The central quantity is

    psi(x) = T⁻¹ Σ_i eps_i K_h(i/T - x) ((i/T - x)/h)**j,

from which the local-linear moment matrix S_{T,x} and data vector D_{T,x}
are assembled.  Sums only ever touch the indices inside the kernel window,
so a grid evaluation costs O(n_grid * T * h) rather than O(n_grid * T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBandwidthError
from .kernels import EPANECHNIKOV, KernelSpec, get_kernel, support_indices

__all__ = [
    "DesignSeries",
    "MomentMatrix",
    "default_grid",
    "kernel_sums",
    "psi_hat",
    "design_moment",
    "moment_matrix",
    "data_vector",
]

MAX_POWER = 4


@dataclass(frozen=True)
class DesignSeries:
    """Observations bound to the design points i/T, i = 1..T."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)  # own copy: the caller's array stays writable
        if v.ndim != 1:
            raise ValueError(f"a design series is one-dimensional, got shape {v.shape}")
        if v.size < 2:
            raise ValueError(f"a design series needs T >= 2 observations, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("a design series must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def T(self) -> int:
        return self.values.size

    @property
    def design(self) -> np.ndarray:
        return np.arange(1, self.T + 1) / self.T

    def __len__(self) -> int:
        return self.T


def as_values(series) -> np.ndarray:
    if isinstance(series, DesignSeries):
        return series.values
    return DesignSeries(series).values


def default_grid(n: int = 201) -> np.ndarray:
    """Uniform evaluation grid {0, 1/(n-1), ..., 1}."""
    return np.linspace(0.0, 1.0, n)


def check_bandwidth(h: float) -> float:
    h = float(h)
    if not 0.0 < h < 0.5:
        raise InvalidBandwidthError(f"bandwidth must lie in (0, 1/2), got {h!r}")
    return h


def _check_power(j: int) -> int:
    if not 0 <= j <= MAX_POWER:
        raise ValueError(f"power j must be in 0..{MAX_POWER}, got {j}")
    return int(j)


def kernel_sums(data, x, h: float, spec: KernelSpec = EPANECHNIKOV, powers=(0,), chunk: int = 256):
    """Kernel averages of several series at several points in one pass.

    Parameters
    ----------
    data : array_like, shape (m, T) or (T,)
        Rows are series observed on the design grid.
    x : array_like
        Evaluation points.
    powers : sequence of int
        Powers j of the local coordinate (i/T - x)/h.

    Returns
    -------
    ndarray, shape (len(x), m, len(powers))
        ``out[k, r, p] = T⁻¹ Σ_i data[r, i] K_h(i/T - x_k) ((i/T - x_k)/h)**powers[p]``.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    T = data.shape[1]
    out = np.zeros((x.size, data.shape[0], len(powers)))
    reach = h * T
    for start in range(0, x.size, chunk):
        xs = x[start:start + chunk]
        lo = max(1, math.floor(xs.min() * T - reach) - 1)
        hi = min(T, math.ceil(xs.max() * T + reach) + 1)
        if hi < lo:
            continue
        idx = np.arange(lo, hi + 1)
        u = (idx / T - xs[:, None]) / h
        k = spec(u) / h
        block = data[:, lo - 1:hi]
        for p, j in enumerate(powers):
            kp = k * u**j if j else k
            out[start:start + chunk, :, p] = kp @ block.T / T
    return out


def psi_hat(series, spec: KernelSpec, x, h: float, j: int = 0):
    """Kernel average T⁻¹ Σ eps_i K_h(i/T - x) ((i/T - x)/h)**j.

    ``x`` may be a scalar or an array of evaluation points.
    """
    eps = as_values(series)
    h = check_bandwidth(h)
    j = _check_power(j)
    spec = get_kernel(spec)
    if np.ndim(x) == 0:
        T = eps.size
        idx = support_indices(T, float(x), h)
        u = (idx / T - x) / h
        return float(np.sum(eps[idx - 1] * spec(u) * u**j)) / (T * h)
    return kernel_sums(eps, x, h, spec, powers=(j,))[:, 0, 0]


def design_moment(spec: KernelSpec, T: int, x, h: float, j: int):
    """s_{T,j}(x) = (Th)⁻¹ Σ_t K((t/T - x)/h) ((t/T - x)/h)**j."""
    return psi_hat(np.ones(int(T)), spec, x, h, j)


@dataclass(frozen=True)
class MomentMatrix:
    """Symmetric 2x2 local-linear moment matrix [[s0, s1], [s1, s2]] at x."""

    s0: float
    s1: float
    s2: float
    x: float
    h: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.s0, self.s1], [self.s1, self.s2]])

    @property
    def det(self) -> float:
        return self.s0 * self.s2 - self.s1 * self.s1

    @property
    def eigenvalues(self) -> tuple[float, float]:
        mean = 0.5 * (self.s0 + self.s2)
        rad = math.hypot(0.5 * (self.s0 - self.s2), self.s1)
        return mean - rad, mean + rad

    @property
    def lambda_min(self) -> float:
        return self.eigenvalues[0]

    def solve(self, v) -> np.ndarray:
        """S⁻¹ v via the adjugate."""
        v0, v1 = v
        d = self.det
        return np.array([(self.s2 * v0 - self.s1 * v1) / d, (self.s0 * v1 - self.s1 * v0) / d])


def moment_matrix(spec: KernelSpec, T: int, x: float, h: float) -> MomentMatrix:
    """S_{T,x} with entries T⁻¹ Σ K_h(x_t - x) ((x_t - x)/h)**j, j = 0, 1, 2."""
    h = check_bandwidth(h)
    s = kernel_sums(np.ones(int(T)), [x], h, get_kernel(spec), powers=(0, 1, 2))[0, 0]
    return MomentMatrix(float(s[0]), float(s[1]), float(s[2]), float(x), h)


def data_vector(series, spec: KernelSpec, x: float, h: float) -> tuple[float, float]:
    """D_{T,x} = (T⁻¹ Σ Y_t K_h(x_t - x), T⁻¹ Σ Y_t K_h(x_t - x)(x_t - x)/h)."""
    y = as_values(series)
    h = check_bandwidth(h)
    d = kernel_sums(y, [x], h, get_kernel(spec), powers=(0, 1))[0, 0]
    return float(d[0]), float(d[1])
