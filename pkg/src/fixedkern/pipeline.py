"""Empirical workflow: CSV in, two-step fit plus residual diagnostics out.

Stages: ingest -> drift correction -> deseasonalize -> bandwidth -> two-step
fit -> diagnostics -> report files (curves.csv, diagnostics.json, *.svg).
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import svg
from .averages import DesignSeries
from .bandwidth import CvConfig, cv_scores
from .diagnostics import LJUNG_BOX_LAGS, DiagnosticsReport, diagnose
from .errors import DataError, FixedKernError, NumericalError
from .io import fmt_real, write_csv, write_json
from .kernels import get_kernel
from .tvar import TwoStepFit, fit_two_step

__all__ = [
    "PipelineConfig",
    "PipelineResult",
    "ingest_csv",
    "deseasonalize",
    "apply_drift_correction",
    "run_pipeline",
]

_MISSING = {"", "nan", "na", "n/a", "null", "none"}


@dataclass
class PipelineConfig:
    input_path: str
    time_column: str = "time"
    value_column: str = "value"
    deseasonalize: bool = False
    harmonics: tuple = (12, 6)
    linear_drift_rate: float = 0.0
    drift_epoch: float | None = None
    kernel: str = "epanechnikov"
    bandwidth_mode: str = "cv"
    h: float | None = None
    v: float | None = None
    b_T: float | None = None
    output_dir: str = "pipeline_out"
    seed: int = 0
    units: str = ""
    max_lag: int = 30
    lb_lags: tuple = LJUNG_BOX_LAGS

    def __post_init__(self):
        self.harmonics = tuple(float(p) for p in self.harmonics)
        if any(p <= 0 for p in self.harmonics):
            raise ValueError("harmonic periods must be positive")
        self.lb_lags = tuple(int(m) for m in self.lb_lags)
        self.bandwidth_mode = str(self.bandwidth_mode).lower()
        if self.bandwidth_mode not in ("cv", "fixed"):
            raise ValueError("bandwidth_mode must be 'cv' or 'fixed'")
        if self.bandwidth_mode == "fixed" and self.h is None:
            raise ValueError("fixed bandwidth mode needs h")
        get_kernel(self.kernel)

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _parse_time(text: str):
    """Return ('num', value) or ('date', date, has_day)."""
    s = text.strip()
    try:
        return ("num", float(s))
    except ValueError:
        pass
    try:
        if len(s) == 7:
            d = dt.date.fromisoformat(s + "-01")
            return ("date", d, False)
        return ("date", dt.date.fromisoformat(s[:10]), True)
    except ValueError:
        return None


def _decimal_year(d: dt.date) -> float:
    start = dt.date(d.year, 1, 1)
    days = (dt.date(d.year + 1, 1, 1) - start).days
    return d.year + (d - start).days / days


def ingest_csv(path, cfg: PipelineConfig | None = None, time_column: str = "time",
               value_column: str = "value"):
    """Read an equally spaced series.

    Returns
    -------
    series : DesignSeries
    years : ndarray
        Timestamps as decimal years (numeric timestamps are taken as given).
    labels : list of str
        Raw timestamp strings.

    Raises
    ------
    DataError
        Ragged rows, missing or non-numeric values, unknown columns or
        irregular spacing, with the offending line number.
    """
    if cfg is not None:
        time_column, value_column = cfg.time_column, cfg.value_column
    path = Path(path)
    if not path.is_file():
        raise DataError(f"input file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty file", line=1) from None
        header = [h.strip() for h in header]
        for col in (time_column, value_column):
            if col not in header:
                raise DataError(f"column {col!r} not in header {header}", line=1)
        ti, vi = header.index(time_column), header.index(value_column)
        labels, stamps, values, lines = [], [], [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"expected {len(header)} fields, found {len(row)}", line=line)
            raw = row[vi].strip()
            if raw.lower() in _MISSING:
                raise DataError(f"missing value {raw!r} in column {value_column!r}", line=line)
            try:
                val = float(raw)
            except ValueError:
                raise DataError(f"non-numeric value {raw!r} in column {value_column!r}", line=line) from None
            if not math.isfinite(val):
                raise DataError(f"non-finite value {raw!r}", line=line)
            stamp = _parse_time(row[ti])
            if stamp is None:
                raise DataError(f"unparseable timestamp {row[ti]!r}", line=line)
            labels.append(row[ti].strip())
            stamps.append(stamp)
            values.append(val)
            lines.append(line)
    if len(values) < 2:
        raise DataError("need at least two observations")
    kinds = {s[0] for s in stamps}
    if len(kinds) > 1:
        raise DataError("mixed numeric and date timestamps")
    if kinds == {"num"}:
        pos = np.array([s[1] for s in stamps])
        years = pos.copy()
    else:
        dates = [s[1] for s in stamps]
        monthly = all(not s[2] for s in stamps) or len({d.day for d in dates}) == 1
        if monthly:
            pos = np.array([d.year * 12 + d.month - 1 for d in dates], dtype=float)
            years = pos / 12.0
        else:
            pos = np.array([d.toordinal() for d in dates], dtype=float)
            years = np.array([_decimal_year(d) for d in dates])
    step = np.diff(pos)
    ref = float(np.median(step))
    if not ref > 0:
        raise DataError("timestamps are not increasing")
    bad = np.flatnonzero(np.abs(step - ref) > 0.01 * ref)
    if bad.size:
        k = int(bad[0])
        raise DataError(
            f"irregular spacing between {labels[k]!r} and {labels[k + 1]!r} "
            f"(step {step[k]:g} vs typical {ref:g})",
            line=lines[k + 1],
        )
    return DesignSeries(np.array(values)), years, labels


def deseasonalize(values, periods=(12, 6)):
    """Remove sin/cos harmonics of the given periods (in samples) by least squares.

    The regression also carries an intercept and a linear term so that a
    trend does not leak into the harmonic coefficients; only the harmonic
    part is subtracted.

    Returns
    -------
    residual : ndarray
    coefficients : dict
        ``{period: (sin_coef, cos_coef)}``.
    """
    y = np.asarray(values.values if isinstance(values, DesignSeries) else values, dtype=float)
    T = y.size
    periods = [float(p) for p in periods]
    n_harm = 2 * len(periods)
    if not T > 4 * n_harm:
        raise ValueError(f"need more than {4 * n_harm} observations to fit {len(periods)} harmonics")
    t = np.arange(1, T + 1, dtype=float)
    cols = [np.ones(T), (t - t.mean()) / T]
    for p in periods:
        cols += [np.sin(2 * np.pi * t / p), np.cos(2 * np.pi * t / p)]
    X = np.column_stack(cols)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise NumericalError(f"harmonic design is rank deficient for periods {periods}")
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    seasonal = X[:, 2:] @ beta[2:]
    coefs = {p: (float(beta[2 + 2 * i]), float(beta[3 + 2 * i])) for i, p in enumerate(periods)}
    return y - seasonal, coefs


def apply_drift_correction(values, years, rate_per_year: float, epoch: float | None = None):
    """Subtract ``rate * (year - epoch)``; epoch defaults to the first timestamp."""
    y = np.asarray(values.values if isinstance(values, DesignSeries) else values, dtype=float)
    years = np.asarray(years, dtype=float)
    epoch = float(years[0]) if epoch is None else float(epoch)
    return y - rate_per_year * (years - epoch)


@dataclass
class PipelineResult:
    config: PipelineConfig
    y: np.ndarray
    fit: TwoStepFit
    first_step: DiagnosticsReport
    final: DiagnosticsReport
    seasonal: dict = field(default_factory=dict)
    cv: object = None
    files: dict = field(default_factory=dict)


def _stage(name):
    def wrap(fn):
        def inner(*a, **k):
            try:
                return fn(*a, **k)
            except (FixedKernError, ValueError) as exc:
                if not hasattr(exc, "stage"):
                    exc.stage = name
                raise
        return inner
    return wrap


def run_pipeline(cfg: PipelineConfig, write: bool = True) -> PipelineResult:
    """Run all stages; errors carry a ``stage`` attribute naming where they arose."""
    spec = get_kernel(cfg.kernel)
    series, years, labels = _stage("ingest")(ingest_csv)(cfg.input_path, cfg)
    y = series.values
    if cfg.linear_drift_rate:
        y = apply_drift_correction(y, years, cfg.linear_drift_rate, cfg.drift_epoch)
    seasonal = {}
    if cfg.deseasonalize:
        y, seasonal = _stage("deseasonalize")(deseasonalize)(y, cfg.harmonics)

    cv = None
    if cfg.bandwidth_mode == "cv":
        cv = _stage("bandwidth")(cv_scores)(y, spec, CvConfig())
        h = cv.h
    else:
        h = float(cfg.h)
    v = h if cfg.v is None else float(cfg.v)
    fit = _stage("fit")(fit_two_step)(y, spec, spec, h, v, cfg.b_T)
    first = _stage("diagnostics")(diagnose)(fit.residuals_v, cfg.max_lag, cfg.lb_lags, arma=True)
    final = _stage("diagnostics")(diagnose)(fit.residuals_e, cfg.max_lag, cfg.lb_lags, arma=False)
    result = PipelineResult(cfg, y, fit, first, final, seasonal, cv)
    if write:
        result.files = _write_outputs(result, years, labels)
    return result


def _write_outputs(res: PipelineResult, years, labels) -> dict:
    cfg, fit = res.config, res.fit
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    T = fit.T
    u = np.arange(1, T + 1) / T
    inside = (u >= fit.interior_margin) & (u <= 1 - fit.interior_margin)
    phi = np.where(inside, fit.phi_on_design(), np.nan)
    e = np.r_[np.nan, fit.residuals_e]
    rows = [[t + 1, labels[t], res.y[t], fit.g_hat.values[t], fit.residuals_v[t], phi[t], e[t]]
            for t in range(T)]
    files = {"curves": write_csv(out / "curves.csv",
                                 ["t", "time", "y", "g_hat", "v_hat", "phi_hat", "e_hat"], rows)}
    conf = asdict(cfg)
    # where the report lands is not part of the result
    conf.pop("output_dir")
    conf["harmonics"] = list(conf["harmonics"])
    conf["lb_lags"] = list(conf["lb_lags"])
    report = {
        "config": conf,
        "units": cfg.units,
        "n_obs": T,
        "h": fit.h,
        "v": fit.v,
        "interior_margin": fit.interior_margin,
        "clamped_residuals": int(np.sum(fit.clamped)),
        "seasonal_coefficients": {fmt_real(p): list(c) for p, c in res.seasonal.items()},
        "cv": None if res.cv is None else {"h_grid": res.cv.h_grid.tolist(), "scores": res.cv.scores.tolist()},
        "phi_hat_interior_median": float(np.median(fit.phi_hat.values)),
        "first_step": res.first_step.to_dict(),
        "final": res.final.to_dict(),
    }
    files["diagnostics"] = write_json(out / "diagnostics.json", report)
    x = np.asarray(years, dtype=float)
    files["series"] = svg.line_chart(out / "series.svg", "Observed series and local-linear trend", x,
                                     [("y", res.y), ("g_hat", fit.g_hat.values)],
                                     x_label="time", y_label=cfg.units)
    files["phi"] = svg.line_chart(out / "phi.svg", "Local-constant AR coefficient", x[inside],
                                  [("phi_hat", fit.phi_hat.values)], x_label="time")
    files["residuals_e"] = svg.line_chart(out / "residuals_e.svg", "Final residuals", x[1:],
                                          [("e_hat", fit.residuals_e)], x_label="time", hlines=(0.0,))
    band_v, band_e = res.first_step.bartlett_band, res.final.bartlett_band
    files["acf_v"] = svg.stem_chart(out / "acf_v.svg", "ACF of first-step residuals", res.first_step.acf, band_v, "acf_v")
    files["pacf_v"] = svg.stem_chart(out / "pacf_v.svg", "PACF of first-step residuals", res.first_step.pacf, band_v, "pacf_v")
    files["acf_e"] = svg.stem_chart(out / "acf_e.svg", "ACF of final residuals", res.final.acf, band_e, "acf_e")
    files["pacf_e"] = svg.stem_chart(out / "pacf_e.svg", "PACF of final residuals", res.final.pacf, band_e, "pacf_e")
    return {k: str(p) for k, p in files.items()}
