"""Monte Carlo harnesses: rate exponents, empirical sup-rate checks, MASE tables."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .averages import default_grid, kernel_sums
from .bandwidth import CvConfig, select_bandwidth
from .errors import InvalidBandwidthRuleError, InvalidParamsError
from .io import write_csv, write_json
from .kernels import EPANECHNIKOV, KernelSpec, get_kernel
from .tvar import TvarModel, fit_local_constant_phi, fit_two_step, simulate, simulate_errors

__all__ = [
    "Mode",
    "RateParams",
    "ThetaResult",
    "theta",
    "rate_target",
    "RateSlopeReport",
    "verify_rate",
    "benchmark_trend",
    "benchmark_phi",
    "benchmark_model",
    "MaseReport",
    "mc_table1",
    "write_mase_csv",
    "write_mase_json",
    "REFERENCE_MASE",
]


class Mode(str, Enum):
    IN_PROBABILITY = "in_probability"
    ALMOST_SURE = "almost_sure"


@dataclass(frozen=True)
class RateParams:
    """Mixing decay ``beta``, moment order ``s``, parameter dimension ``m``,
    expansion constant ``c`` and moment growth ``lam``."""

    beta: float
    s: float
    m: int = 0
    c: float = 1.0
    lam: float = 0.0
    mode: Mode = Mode.IN_PROBABILITY

    def __post_init__(self):
        mode = Mode(self.mode)
        object.__setattr__(self, "mode", mode)
        need = 2.0 if mode is Mode.IN_PROBABILITY else 4.0
        if not self.s > need:
            raise InvalidParamsError(f"{mode.value} needs s > {need:g}, got s={self.s}")
        if not self.beta > 2:
            raise InvalidParamsError(f"beta must exceed 2, got {self.beta}")
        if self.m < 0 or not self.c > 0 or self.lam < 0:
            raise InvalidParamsError("need m >= 0, c > 0 and lam >= 0")


@dataclass(frozen=True)
class ThetaResult:
    theta: float
    beta_lower_bound: float
    admissible: bool


def theta(params: RateParams) -> ThetaResult:
    """Bandwidth exponent theta and the mixing-rate lower bound on beta.

    For the almost-sure mode admissibility also requires theta < 1 - 4/s,
    the condition under which the truncation level satisfies a_T tau_T -> 0.
    """
    b, s, m, c = params.beta, params.s, params.m, params.c
    if params.mode is Mode.IN_PROBABILITY:
        th = (b * (s - 2) - m * (s - 1) * (1 + 2 * c) - 2 * s + 1) / (b * s + m * (s - 1) + 1)
        bound = (m * (s - 1) * (1 + 2 * c) + 2 * s - 1) / (s - 2)
        ok = b > bound
    else:
        k = 5 + m * (1 + 2 * c)
        th = ((b + 1) * (s - 4) - (s - 1) * k) / ((b + 1) + (m + 1) * (s - 1))
        bound = ((s - 1) * k - (s - 4)) / (s - 4)
        ok = b > bound and th < 1 - 4 / s
    if ok and not 0 < th < 1:
        raise AssertionError(f"admissible parameters gave theta={th} outside (0, 1)")
    return ThetaResult(theta=float(th), beta_lower_bound=float(bound), admissible=bool(ok))


def expansion_exponent(params: RateParams) -> float:
    """r = min{c, (1 - theta)/(2 lam)} so that d_T = T**r."""
    th = theta(params).theta
    if params.lam == 0:
        return params.c
    return min(params.c, (1 - th) / (2 * params.lam))


def rate_target(T: float, h: float, lam: float = 0.0, d_T: float = 1.0) -> float:
    """d_T**lam * sqrt(ln T / (T h))."""
    return float(d_T**lam * math.sqrt(math.log(T) / (T * h)))


def default_h_rule(T: int) -> float:
    return (math.log(T) / T) ** 0.2


# Gaussian IID / AR(1) data have all moments and geometric mixing; any finite
# (beta, s) is legitimate, these give a conservative theta of about 0.9.
GAUSSIAN_RATE_PARAMS = RateParams(beta=1000.0, s=20.0)


@dataclass
class RateSlopeReport:
    T: np.ndarray
    h: np.ndarray
    median_sup: np.ndarray
    rate: np.ndarray
    slope: float
    intercept: float
    r2: float
    process: str
    j: int
    n_reps: int


def _process(process):
    if isinstance(process, tuple):
        name, arg = process
    else:
        name, _, arg = str(process).lower().partition(":")
        arg = float(arg) if arg else 0.75
    name = str(name).lower()
    if name == "iid":
        return "iid", 0.0
    if name in ("ar1", "ar(1)"):
        return "ar1", float(arg)
    raise ValueError(f"unknown process {process!r}; use 'iid' or ('ar1', phi)")


def _zero_mean_draw(kind, phi, T, rng):
    if kind == "iid":
        return rng.standard_normal(T)
    model = TvarModel.constant(lambda u: 0.0 * u, phi)
    return simulate_errors(model, T, rng)


def verify_rate(spec: KernelSpec = EPANECHNIKOV, process="iid", j: int = 0,
                T_list: Sequence[int] = (500, 1000, 2000, 4000, 8000),
                h_rule: Callable[[int], float] = default_h_rule, n_reps: int = 100, seed: int = 0,
                grid=None, rate_params: RateParams = GAUSSIAN_RATE_PARAMS) -> RateSlopeReport:
    """Regress log median sup_x |psi_hat(x)| on log sqrt(ln T/(T h)).

    The data are zero mean, so E psi_hat = 0 and the sup is the centred
    deviation controlled by the uniform rate.  A slope near one means the
    empirical sup error tracks the theoretical envelope.
    """
    T_list = np.asarray(sorted(set(int(T) for T in T_list)))
    if T_list.size < 2 or n_reps < 1:
        raise ValueError("need at least two distinct sample sizes and n_reps >= 1")
    spec = get_kernel(spec)
    kind, phi = _process(process)
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    hs = np.array([float(h_rule(int(T))) for T in T_list])
    if np.any(hs <= 0) or np.any(hs >= 0.5):
        raise InvalidBandwidthRuleError(f"h_rule produced bandwidths outside (0, 1/2): {hs}")
    th = theta(rate_params).theta
    crit = np.log(T_list) / (T_list**th * hs)
    if not np.all(np.diff(crit) < 0):
        raise InvalidBandwidthRuleError(
            f"ln T / (T^theta h) is not decreasing over T_list (theta={th:.3f}): {crit}"
        )
    med = np.empty(T_list.size)
    for a, (T, h) in enumerate(zip(T_list, hs)):
        sups = np.empty(n_reps)
        for r in range(n_reps):
            rng = np.random.default_rng([seed, int(T), r])
            eps = _zero_mean_draw(kind, phi, int(T), rng)
            psi = kernel_sums(eps, grid, h, spec, powers=(j,))[:, 0, 0]
            sups[r] = np.max(np.abs(psi))
        med[a] = np.median(sups)
    rate = np.array([rate_target(T, h) for T, h in zip(T_list, hs)])
    X, Y = np.log(rate), np.log(med)
    slope, intercept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + intercept)
    r2 = 1.0 - resid @ resid / np.sum((Y - Y.mean()) ** 2)
    label = kind if kind == "iid" else f"ar1({phi:g})"
    return RateSlopeReport(T_list, hs, med, rate, float(slope), float(intercept), float(r2),
                           label, j, n_reps)


def benchmark_trend(u):
    u = np.asarray(u, dtype=float)
    return -70.0 + 134.0 * u - 120.0 * np.tanh(1.1 * (u - 0.56))


def benchmark_phi(u):
    u = np.asarray(u, dtype=float)
    return 0.755 + 0.02 * np.exp(-0.36 * u) * np.sin(1.72 * np.pi * u + 2.1)


def benchmark_model(sigma2: float = 1.0) -> TvarModel:
    return TvarModel(g=benchmark_trend, phi=benchmark_phi, sigma_e=math.sqrt(sigma2), phi_bound=0.8)


# MASE values reported for N = 2000 replications: (T, sigma2) -> (g, phi).
REFERENCE_MASE = {
    (100, 1.0): (0.816, 0.051), (300, 1.0): (0.360, 0.009), (700, 1.0): (0.171, 0.002),
    (100, 3.0): (2.139, 0.043), (300, 3.0): (1.012, 0.008), (700, 3.0): (0.477, 0.002),
}

_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


@dataclass
class MaseReport:
    """Monte Carlo summary for one (T, sigma2) cell.

    ``mase_phi`` averages the squared error of phi_hat over every design
    point t/T; ``mase_phi_interior`` restricts it to the interior set.
    """

    T: int
    sigma2: float
    n_reps: int
    mase_g: float
    mase_phi: float
    ase_g_quantiles: list
    ase_phi_quantiles: list
    seed_base: int
    mase_phi_interior: float = float("nan")
    median_h: float = float("nan")
    ase_g: np.ndarray = field(default=None, repr=False)
    ase_phi: np.ndarray = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("ase_g")
        d.pop("ase_phi")
        d["n_obs"] = d.pop("T")
        return d


def _replicate(args):
    T, sigma2, r, seed_base, mode, cv_config = args
    g_true, phi_true = benchmark_trend, benchmark_phi
    y = simulate(benchmark_model(sigma2), T, [seed_base, T, int(round(sigma2 * 1000)), r])
    if mode[0] == "cv":
        h = select_bandwidth(y, EPANECHNIKOV, cv_config)
        v = h
    else:
        h, v = mode[1], mode[2]
    fit = fit_two_step(y, EPANECHNIKOV, EPANECHNIKOV, h, v)
    u = np.arange(1, T + 1) / T
    ase_g = float(np.mean((fit.g_hat.values - g_true(u)) ** 2))
    phi_all = fit_local_constant_phi(fit.residuals_v, EPANECHNIKOV, fit.v, u)
    ase_phi = float(np.mean((phi_all.values - phi_true(u)) ** 2))
    ase_phi_int = float(np.mean((fit.phi_hat.values - phi_true(fit.phi_hat.grid)) ** 2))
    return ase_g, ase_phi, ase_phi_int, h


def _mode(bandwidth_mode):
    if isinstance(bandwidth_mode, str):
        if bandwidth_mode.lower() != "cv":
            raise ValueError("bandwidth_mode is 'cv' or ('fixed', h, v)")
        return ("cv",)
    kind, h, v = bandwidth_mode
    if str(kind).lower() != "fixed":
        raise ValueError("bandwidth_mode is 'cv' or ('fixed', h, v)")
    return ("fixed", float(h), float(v))


def mc_table1(T_list=(100, 300, 700), sigma2_list=(1.0, 3.0), n_reps: int = 200, seed_base: int = 0,
              bandwidth_mode="cv", cv_config: CvConfig | None = None, n_jobs: int = 1) -> list[MaseReport]:
    """Replicate the two-step estimator on the benchmark design.

    Each replication draws from its own generator seeded by
    ``(seed_base, T, sigma2, r)``, so results do not depend on ``n_jobs``.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be at least 1")
    mode = _mode(bandwidth_mode)
    reports = []
    pool = ProcessPoolExecutor(n_jobs) if n_jobs > 1 else None
    try:
        for sigma2 in sigma2_list:
            for T in T_list:
                tasks = [(int(T), float(sigma2), r, seed_base, mode, cv_config) for r in range(n_reps)]
                out = list(pool.map(_replicate, tasks, chunksize=8)) if pool else [_replicate(t) for t in tasks]
                a = np.array(out)
                reports.append(MaseReport(
                    T=int(T), sigma2=float(sigma2), n_reps=n_reps,
                    mase_g=float(a[:, 0].mean()), mase_phi=float(a[:, 1].mean()),
                    ase_g_quantiles=np.quantile(a[:, 0], _QUANTILES).tolist(),
                    ase_phi_quantiles=np.quantile(a[:, 1], _QUANTILES).tolist(),
                    seed_base=seed_base,
                    mase_phi_interior=float(a[:, 2].mean()),
                    median_h=float(np.median(a[:, 3])),
                    ase_g=a[:, 0], ase_phi=a[:, 1],
                ))
    finally:
        if pool:
            pool.shutdown()
    return reports


def write_mase_csv(reports, path):
    header = ["T", "sigma2", "n_reps", "mase_g", "mase_phi", "mase_phi_interior", "median_h",
              "reference_mase_g", "reference_mase_phi"]
    rows = []
    for r in reports:
        ref = REFERENCE_MASE.get((r.T, r.sigma2), (float("nan"), float("nan")))
        rows.append([r.T, r.sigma2, r.n_reps, r.mase_g, r.mase_phi, r.mase_phi_interior,
                     r.median_h, ref[0], ref[1]])
    return write_csv(path, header, rows)


def write_mase_json(reports, path):
    return write_json(path, [r.to_dict() for r in reports])
