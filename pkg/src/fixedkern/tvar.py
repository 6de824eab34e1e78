"""Trend plus time-varying AR(1) errors, and the two-step estimator.

Model::

    Y_t = g(t/T) + V_t,    V_t = phi(t/T) V_{t-1} + e_t,   t = 1..T.

Step 1 fits g by local-linear smoothing; step 2 fits phi by a local-constant
ratio of lagged residual cross-products on an interior set [b, 1-b].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .averages import DesignSeries, as_values, kernel_sums
from .errors import DegenerateDenominatorError, InvalidBandwidthError
from .kernels import EPANECHNIKOV, KernelSpec, get_kernel
from .local_linear import CurveEstimate, fit_local_linear

__all__ = [
    "TvarModel",
    "TwoStepFit",
    "make_rng",
    "simulate",
    "simulate_errors",
    "fit_local_constant_phi",
    "fit_two_step",
    "default_margin",
    "INNOVATIONS",
]

DENOM_TOL = 1e-10


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _gaussian(rng, n):
    return rng.standard_normal(n)


def _uniform(rng, n):
    return rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), n)


def _student_t(df):
    if not df > 4:
        raise ValueError("Student-t innovations need df > 4 for finite fourth moments")

    def draw(rng, n):
        return rng.standard_t(df, n) / np.sqrt(df / (df - 2.0))

    return draw


# Unit-variance innovation samplers; simulate() rescales by sigma_e.
INNOVATIONS: dict[str, Callable] = {
    "gaussian": _gaussian,
    "uniform": _uniform,
    "student_t": _student_t(6.0),
}


@dataclass(frozen=True)
class TvarModel:
    """Trend ``g`` and AR coefficient ``phi`` on [0, 1] with innovation scale."""

    g: Callable[[np.ndarray], np.ndarray]
    phi: Callable[[np.ndarray], np.ndarray]
    sigma_e: float = 1.0
    phi_bound: float = 0.99

    def __post_init__(self):
        if not 0.0 < self.phi_bound < 1.0:
            raise ValueError("phi_bound must lie in (0, 1)")
        if self.sigma_e < 0:
            raise ValueError("sigma_e must be nonnegative")
        u = np.linspace(0.0, 1.0, 10_000)
        peak = float(np.max(np.abs(np.broadcast_to(self.phi(u), u.shape))))
        if peak > self.phi_bound:
            raise ValueError(f"max |phi| = {peak:.6g} exceeds phi_bound = {self.phi_bound}")

    @classmethod
    def constant(cls, g, phi: float, sigma_e: float = 1.0) -> "TvarModel":
        return cls(g=g, phi=lambda u: np.full_like(np.asarray(u, dtype=float), phi),
                   sigma_e=sigma_e, phi_bound=max(abs(phi), 1e-6))

    def trend(self, T: int) -> np.ndarray:
        u = np.arange(1, T + 1) / T
        return np.broadcast_to(np.asarray(self.g(u), dtype=float), u.shape).copy()

    def coefficients(self, T: int) -> np.ndarray:
        u = np.arange(1, T + 1) / T
        return np.broadcast_to(np.asarray(self.phi(u), dtype=float), u.shape).copy()


def simulate_errors(model: TvarModel, T: int, seed=None, innovations: str | Callable = "gaussian",
                    v0: float | None = None) -> np.ndarray:
    """The AR part V_1..V_T.

    V_0 is drawn first from N(0, sigma_e^2 / (1 - phi(0)^2)) unless ``v0`` is
    given, then e_1..e_T; the order of draws is fixed so a seed pins the path.
    """
    if T < 2:
        raise ValueError("T must be at least 2")
    rng = make_rng(seed)
    draw = INNOVATIONS[innovations] if isinstance(innovations, str) else innovations
    phi0 = float(np.asarray(model.phi(np.array([0.0])), dtype=float).ravel()[0])
    z0 = rng.standard_normal()
    if v0 is None:
        v0 = model.sigma_e * z0 / np.sqrt(1.0 - phi0 * phi0)
    e = model.sigma_e * draw(rng, T)
    phi = model.coefficients(T)
    v = np.empty(T)
    prev = float(v0)
    for t in range(T):
        prev = phi[t] * prev + e[t]
        v[t] = prev
    return v


def simulate(model: TvarModel, T: int, seed=None, innovations: str | Callable = "gaussian",
             v0: float | None = None) -> DesignSeries:
    """Draw Y_t = g(t/T) + V_t; deterministic given ``seed``."""
    return DesignSeries(model.trend(T) + simulate_errors(model, T, seed, innovations, v0))


def fit_local_constant_phi(v_hat, spec: KernelSpec = EPANECHNIKOV, v_bw: float = 0.1, grid=None) -> CurveEstimate:
    """Local-constant AR coefficient.

    phi_hat(x) = Σ_{t>=2} G_v(t/T - x) V_t V_{t-1} / Σ_{t>=2} G_v(t/T - x) V_{t-1}^2.

    Raises
    ------
    DegenerateDenominatorError
        If the denominator falls below 1e-10 at some grid point.
    """
    v = as_values(v_hat)
    T = v.size
    if T < 3:
        raise ValueError("need at least 3 residuals")
    if not 0.0 < v_bw < 0.5:
        raise InvalidBandwidthError(f"bandwidth must lie in (0, 1/2), got {v_bw!r}")
    spec = get_kernel(spec)
    grid = np.arange(1, T + 1) / T if grid is None else np.asarray(grid, dtype=float)
    cross = np.zeros(T)
    cross[1:] = v[1:] * v[:-1]
    lagsq = np.zeros(T)
    lagsq[1:] = v[:-1] ** 2
    sums = kernel_sums(np.vstack([cross, lagsq]), grid, v_bw, spec, powers=(0,))
    num, den = sums[:, 0, 0], sums[:, 1, 0]
    bad = ~(den >= DENOM_TOL)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise DegenerateDenominatorError(grid[k], den[k])
    return CurveEstimate(grid=grid, values=num / den, bandwidth=float(v_bw))


def default_margin(v_bw: float) -> float:
    """Interior margin b_T: twice the step-2 bandwidth, pulled back below 1/2 when needed."""
    b = 2.0 * v_bw
    if b >= 0.5:
        b = 0.5 * (v_bw + 0.5)
    return b


@dataclass
class TwoStepFit:
    g_hat: CurveEstimate
    residuals_v: np.ndarray
    phi_hat: CurveEstimate
    residuals_e: np.ndarray
    h: float
    v: float
    interior_margin: float
    # True where ê_t used a phi_hat value clamped from the nearest interior point
    clamped: np.ndarray = field(repr=False, default=None)

    @property
    def T(self) -> int:
        return self.residuals_v.size

    def phi_on_design(self) -> np.ndarray:
        """phi_hat at t/T, t = 1..T, clamped to the nearest interior value outside I_T."""
        u = np.arange(1, self.T + 1) / self.T
        return self.phi_hat(u)


def fit_two_step(series, spec_k: KernelSpec = EPANECHNIKOV, spec_g: KernelSpec | None = None,
                 h: float = 0.1, v_bw: float | None = None, b_T: float | None = None) -> TwoStepFit:
    """Local-linear trend, then local-constant AR coefficient on [b_T, 1 - b_T].

    ``v_bw`` defaults to ``h``; ``b_T`` defaults to :func:`default_margin`.
    """
    y = as_values(series)
    T = y.size
    spec_k = get_kernel(spec_k)
    spec_g = spec_k if spec_g is None else get_kernel(spec_g)
    v_bw = float(h if v_bw is None else v_bw)
    b_T = default_margin(v_bw) if b_T is None else float(b_T)
    if not 0.0 < v_bw <= b_T < 0.5:
        raise InvalidBandwidthError(f"need 0 < v ({v_bw:.4g}) <= b_T ({b_T:.4g}) < 1/2")

    g_hat = fit_local_linear(y, spec_k, h)
    v_res = y - g_hat.values
    u = np.arange(1, T + 1) / T
    inside = (u >= b_T) & (u <= 1.0 - b_T)
    if not np.any(inside):
        raise InvalidBandwidthError(f"interior set [{b_T:.4g}, {1 - b_T:.4g}] holds no design point")
    phi_hat = fit_local_constant_phi(v_res, spec_g, v_bw, u[inside])
    phi_t = phi_hat(u)
    e_res = v_res[1:] - phi_t[1:] * v_res[:-1]
    return TwoStepFit(
        g_hat=g_hat,
        residuals_v=v_res,
        phi_hat=phi_hat,
        residuals_e=e_res,
        h=float(h),
        v=v_bw,
        interior_margin=b_T,
        clamped=~inside[1:],
    )
