"""Residual diagnostics: ACF/PACF, Bartlett bands, Ljung-Box and an ARMA BIC grid."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter
from scipy.special import gammainc, gammaincc

from .errors import ConvergenceError, DegenerateSeriesError

__all__ = [
    "acf",
    "pacf",
    "bartlett_band",
    "chi2_cdf",
    "chi2_sf",
    "ljung_box",
    "ArmaFit",
    "fit_arma_css",
    "bic_grid",
    "DiagnosticsReport",
    "diagnose",
    "LJUNG_BOX_LAGS",
]

LJUNG_BOX_LAGS = (5, 8, 10, 13, 15, 18, 20, 23, 25, 28, 30)


def _as_series(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


def acf(x, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags 1..max_lag (full-sample denominator)."""
    x = _as_series(x)
    if x.size < max_lag + 2:
        raise ValueError(f"need at least max_lag + 2 = {max_lag + 2} observations, got {x.size}")
    d = x - x.mean()
    denom = d @ d
    if not denom > 0:
        raise DegenerateSeriesError("series has zero variance; autocorrelation undefined")
    return np.array([d[k:] @ d[:-k] / denom for k in range(1, max_lag + 1)])


def _durbin_levinson(rho: np.ndarray) -> np.ndarray:
    L = rho.size
    out = np.empty(L)
    prev = np.empty(0)
    v = 1.0
    for k in range(1, L + 1):
        r = rho[k - 1]
        if k == 1:
            a = r
        else:
            a = (r - prev @ rho[k - 2::-1]) / v
        cur = np.empty(k)
        cur[:-1] = prev - a * prev[::-1]
        cur[-1] = a
        v *= 1.0 - a * a
        out[k - 1] = a
        prev = cur
    return out


def pacf(x, max_lag: int) -> np.ndarray:
    """Partial autocorrelations 1..max_lag via the Durbin-Levinson recursion."""
    return _durbin_levinson(acf(x, max_lag))


def bartlett_band(T: int) -> float:
    """Half-width 1.96/sqrt(T) of the approximate 95% white-noise band."""
    return 1.96 / math.sqrt(T)


def chi2_cdf(q, df):
    return gammainc(0.5 * np.asarray(df, dtype=float), 0.5 * np.asarray(q, dtype=float))


def chi2_sf(q, df):
    return gammaincc(0.5 * np.asarray(df, dtype=float), 0.5 * np.asarray(q, dtype=float))


def ljung_box(x, lags=LJUNG_BOX_LAGS) -> list[tuple[int, float, float]]:
    """(lag, Q, p-value) with Q_m = T(T+2) Σ_{k<=m} rho_k^2/(T-k) against chi2(m)."""
    x = _as_series(x)
    T = x.size
    lags = [int(m) for m in np.atleast_1d(lags)]
    top = max(lags)
    if not top < T / 2:
        raise ValueError(f"largest lag {top} must be below T/2 = {T / 2}")
    rho = acf(x, top)
    terms = np.cumsum(rho**2 / (T - np.arange(1, top + 1)))
    out = []
    for m in lags:
        q = float(T * (T + 2) * terms[m - 1])
        out.append((m, q, float(chi2_sf(q, m))))
    return out


def _pacf_to_coef(u: np.ndarray) -> np.ndarray:
    """Map unconstrained reals to the coefficients of a stationary AR polynomial."""
    r = np.tanh(u)
    coef = np.empty(0)
    for k, a in enumerate(r):
        nxt = np.empty(k + 1)
        nxt[:k] = coef - a * coef[::-1]
        nxt[k] = a
        coef = nxt
    return coef


def _coef_to_pacf(coef: np.ndarray) -> np.ndarray:
    coef = np.array(coef, dtype=float)
    p = coef.size
    r = np.empty(p)
    for k in range(p, 0, -1):
        a = coef[k - 1]
        r[k - 1] = a
        if k > 1:
            coef = (coef[:k - 1] + a * coef[k - 2::-1]) / (1.0 - a * a)
    return np.arctanh(np.clip(r, -0.999, 0.999))


@dataclass
class ArmaFit:
    p: int
    q: int
    ar: np.ndarray
    ma: np.ndarray
    sigma2: float
    loglik: float
    bic: float
    nobs: int
    converged: bool = True
    free: np.ndarray = field(default=None, repr=False)  # unconstrained optimizer coordinates


def _css_residuals(x, ar, ma):
    # x_t - Σ ar_i x_{t-i} = e_t + Σ ma_j e_{t-j}, zero pre-sample values
    return lfilter(np.concatenate(([1.0], -ar)), np.concatenate(([1.0], ma)), x)


def fit_arma_css(x, p: int, q: int, n_cond: int | None = None, maxiter: int | None = None,
                 demean: bool = True, start=None) -> ArmaFit:
    """Conditional-sum-of-squares ARMA(p, q) fit by Nelder-Mead.

    AR and MA coefficients are parameterised through partial autocorrelations
    (tanh of free reals) so every iterate is stationary and invertible.  The
    first ``n_cond`` residuals (default ``p``) are excluded from the sum of
    squares; pass a common ``n_cond`` when comparing orders by BIC.
    ``start`` optionally gives initial unconstrained coordinates (AR block
    first), e.g. ``free`` of a neighbouring fit padded with zeros.

    Raises
    ------
    ConvergenceError
        If the simplex search exhausts its budget; ``.best`` is the ArmaFit at
        the best iterate.
    """
    x = _as_series(x)
    if not (0 <= p <= 4 and 0 <= q <= 4):
        raise ValueError("orders p and q must lie in 0..4")
    T = x.size
    if T < 20 * (p + q + 1):
        raise ValueError(f"need at least {20 * (p + q + 1)} observations for ARMA({p},{q})")
    if demean:
        x = x - x.mean()
    n_cond = p if n_cond is None else int(n_cond)
    n = T - n_cond

    def unpack(theta):
        ar = _pacf_to_coef(theta[:p])
        ma = -_pacf_to_coef(theta[p:])
        return ar, ma

    def objective(theta):
        e = _css_residuals(x, *unpack(theta))[n_cond:]
        return math.log(e @ e)

    converged = True
    if p + q == 0:
        theta_hat = np.empty(0)
    else:
        if start is None:
            start = np.zeros(p + q)
            if p:
                start[:p] = np.arctanh(np.clip(pacf(x, p), -0.95, 0.95))
        start = np.asarray(start, dtype=float)
        maxiter = maxiter or 400 * (p + q)
        res = minimize(objective, start, method="Nelder-Mead",
                       options={"maxiter": maxiter, "maxfev": 2 * maxiter,
                                "xatol": 1e-5, "fatol": 1e-9, "adaptive": p + q > 2})
        theta_hat, converged = res.x, bool(res.success)
    ar, ma = unpack(theta_hat)
    e = _css_residuals(x, ar, ma)[n_cond:]
    sigma2 = float(e @ e / n)
    loglik = -0.5 * n * (math.log(2 * math.pi * sigma2) + 1.0)
    bic = -2.0 * loglik + (p + q + 1) * math.log(T)
    fit = ArmaFit(p, q, ar, ma, sigma2, loglik, bic, n, converged, np.asarray(theta_hat))
    if not converged:
        raise ConvergenceError(f"ARMA({p},{q}) CSS search did not converge", best=fit)
    return fit


def bic_grid(x, max_p: int = 4, max_q: int = 4):
    """BIC for every (p, q) on a common estimation sample.

    Returns the (max_p+1, max_q+1) BIC matrix and the minimising order, ties
    broken by smaller p+q, then smaller p.  Cells whose search hit the budget
    use the best iterate found.  Each ARMA(p, q) search starts from the
    ARMA(p, q-1) optimum with a zero MA coefficient appended.
    """
    x = _as_series(x)
    grid = np.full((max_p + 1, max_q + 1), np.nan)
    for p in range(max_p + 1):
        prev = None
        for q in range(max_q + 1):
            start = None if prev is None else np.r_[prev.free, 0.0]
            try:
                fit = fit_arma_css(x, p, q, n_cond=max_p, start=start)
            except ConvergenceError as exc:
                fit = exc.best
            grid[p, q] = fit.bic
            prev = fit
    best = min(((grid[p, q], p + q, p, q) for p in range(max_p + 1) for q in range(max_q + 1)))
    return grid, (best[2], best[3])


@dataclass
class DiagnosticsReport:
    acf: np.ndarray
    pacf: np.ndarray
    bartlett_band: float
    ljung_box: list = field(default_factory=list)
    bic_grid: np.ndarray | None = None
    best_order: tuple | None = None

    def to_dict(self) -> dict:
        return {
            "acf": self.acf.tolist(),
            "pacf": self.pacf.tolist(),
            "bartlett_band": self.bartlett_band,
            "ljung_box": [{"lag": m, "q": q, "p_value": pv} for m, q, pv in self.ljung_box],
            "bic_grid": None if self.bic_grid is None else self.bic_grid.tolist(),
            "best_order": None if self.best_order is None else list(self.best_order),
        }


def diagnose(x, max_lag: int = 30, lb_lags=LJUNG_BOX_LAGS, arma: bool = True,
             max_p: int = 4, max_q: int = 4) -> DiagnosticsReport:
    x = _as_series(x)
    max_lag = min(max_lag, x.size - 2)
    lb_lags = [m for m in lb_lags if m < x.size / 2]
    grid, best = bic_grid(x, max_p, max_q) if arma else (None, None)
    return DiagnosticsReport(
        acf=acf(x, max_lag),
        pacf=pacf(x, max_lag),
        bartlett_band=bartlett_band(x.size),
        ljung_box=ljung_box(x, lb_lags) if lb_lags else [],
        bic_grid=grid,
        best_order=best,
    )
