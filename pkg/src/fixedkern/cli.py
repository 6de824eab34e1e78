"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 data or file error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import svg
from .bandwidth import CvConfig, cv_scores
from .diagnostics import LJUNG_BOX_LAGS, diagnose
from .errors import DataError, FixedKernError, NumericalError
from .experiments import (
    Mode,
    RateParams,
    benchmark_model,
    mc_table1,
    theta,
    verify_rate,
    write_mase_csv,
    write_mase_json,
)
from .io import dumps_json, write_csv, write_json
from .kernels import KERNELS, get_kernel
from .pipeline import PipelineConfig, ingest_csv, run_pipeline
from .tvar import TvarModel, fit_two_step, simulate

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _out(args, default: str) -> Path:
    out = Path(args.output or default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_values(args):
    return ingest_csv(args.input, time_column=args.time_column, value_column=args.value_column)


def cmd_simulate(args) -> int:
    if args.phi is None:
        model = benchmark_model(args.sigma2)
    else:
        model = TvarModel.constant(lambda u: 0.0 * u, args.phi, sigma_e=float(np.sqrt(args.sigma2)))
    y = simulate(model, args.T, seed=args.seed, innovations=args.innovations).values
    out = _out(args, ".")
    path = write_csv(out / "series.csv", ["time", "value"], [[t + 1, v] for t, v in enumerate(y)])
    print(path)
    return EXIT_OK


def cmd_fit(args) -> int:
    series, _, _ = _load_values(args)
    spec = get_kernel(args.kernel)
    fit = fit_two_step(series, spec, spec, args.h, args.v, args.b_T)
    T = fit.T
    u = np.arange(1, T + 1) / T
    inside = (u >= fit.interior_margin) & (u <= 1 - fit.interior_margin)
    phi = np.where(inside, fit.phi_on_design(), np.nan)
    e = np.r_[np.nan, fit.residuals_e]
    rows = [[t + 1, series.values[t], fit.g_hat.values[t], fit.residuals_v[t], phi[t], e[t]] for t in range(T)]
    out = _out(args, ".")
    write_csv(out / "curves.csv", ["t", "y", "g_hat", "v_hat", "phi_hat", "e_hat"], rows)
    print(dumps_json({"n_obs": T, "h": fit.h, "v": fit.v, "interior_margin": fit.interior_margin,
                      "phi_hat_interior_median": float(np.median(fit.phi_hat.values))}), end="")
    return EXIT_OK


def cmd_cv(args) -> int:
    series, _, _ = _load_values(args)
    cfg = CvConfig(h_grid=None if args.h_grid is None else tuple(_floats(args.h_grid)),
                   v_block=args.v_block, h_gap=args.h_gap)
    res = cv_scores(series, get_kernel(args.kernel), cfg)
    report = {"h": res.h, "h_grid": res.h_grid.tolist(), "scores": res.scores.tolist()}
    if args.output:
        write_json(_out(args, ".") / "cv.json", report)
    print(dumps_json(report), end="")
    return EXIT_OK


def cmd_mc_table1(args) -> int:
    mode = "cv" if args.h is None else ("fixed", args.h, args.v if args.v is not None else args.h)
    reports = mc_table1(_ints(args.T), _floats(args.sigma2), n_reps=args.reps, seed_base=args.seed,
                        bandwidth_mode=mode, n_jobs=args.threads)
    out = _out(args, ".")
    write_mase_csv(reports, out / "mase.csv")
    write_mase_json(reports, out / "mase.json")
    for r in reports:
        print(f"T={r.T:5d} sigma2={r.sigma2:g}  mase_g={r.mase_g:.4f}  mase_phi={r.mase_phi:.5f}  "
              f"median_h={r.median_h:.3f}")
    return EXIT_OK


def cmd_rate_check(args) -> int:
    rep = verify_rate(get_kernel(args.kernel), args.process, args.j, _ints(args.T), n_reps=args.reps,
                      seed=args.seed)
    report = {"process": rep.process, "j": rep.j, "n_reps": rep.n_reps, "sample_sizes": rep.T.tolist(),
              "h": rep.h.tolist(), "median_sup": rep.median_sup.tolist(), "rate": rep.rate.tolist(),
              "slope": rep.slope, "intercept": rep.intercept, "r2": rep.r2}
    if args.output:
        write_json(_out(args, ".") / "rate_check.json", report)
    print(dumps_json(report), end="")
    return EXIT_OK


def cmd_theta(args) -> int:
    params = RateParams(beta=args.beta, s=args.s, m=args.m, c=args.c, lam=args.lam, mode=Mode(args.mode))
    res = theta(params)
    print(dumps_json({"mode": params.mode.value, "theta": res.theta,
                      "beta_lower_bound": res.beta_lower_bound, "admissible": res.admissible}), end="")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    series, _, _ = _load_values(args)
    rep = diagnose(series.values, args.max_lag, LJUNG_BOX_LAGS, arma=not args.no_arma)
    out = _out(args, ".")
    write_json(out / "diagnostics.json", rep.to_dict())
    svg.stem_chart(out / "acf.svg", "Sample autocorrelation", rep.acf, rep.bartlett_band, "acf")
    svg.stem_chart(out / "pacf.svg", "Sample partial autocorrelation", rep.pacf, rep.bartlett_band, "pacf")
    for m, q, p in rep.ljung_box:
        print(f"lag {m:3d}  Q={q:9.3f}  p={p:.4f}")
    if rep.best_order is not None:
        print(f"BIC order (p, q) = {rep.best_order}")
    return EXIT_OK


_PIPELINE_FLAGS = ("input", "time_column", "value_column", "kernel", "h", "v", "b_T", "units")


def cmd_pipeline(args) -> int:
    conf = dict(args.config_data)
    for key in _PIPELINE_FLAGS:
        val = getattr(args, key)
        if val is not None:
            conf["input_path" if key == "input" else key] = val
    if args.deseasonalize:
        conf["deseasonalize"] = True
    if args.harmonics:
        conf["harmonics"] = _floats(args.harmonics)
    if args.drift_rate is not None:
        conf["linear_drift_rate"] = args.drift_rate
    if args.h is not None:
        conf.setdefault("bandwidth_mode", "fixed")
    conf["seed"] = args.seed
    conf["output_dir"] = args.output or conf.get("output_dir", "pipeline_out")
    if "input_path" not in conf:
        raise _Usage("pipeline needs an input CSV (positional argument or 'input_path' in --config)")
    try:
        cfg = PipelineConfig.from_dict(conf)
    except TypeError as exc:
        raise _Usage(str(exc)) from None
    res = run_pipeline(cfg)
    print(f"h={res.fit.h:.4g} v={res.fit.v:.4g} median phi_hat={np.median(res.fit.phi_hat.values):.4f}")
    for name, path in res.files.items():
        print(f"{name}: {path}")
    return EXIT_OK


class _Usage(Exception):
    pass


def _add_input(p, optional: bool = False):
    # pipeline options may also come from --config, so nothing is required there
    p.add_argument("input", nargs="?" if optional else None, help="CSV file with a header row")
    p.add_argument("--time-column", default=None if optional else "time")
    p.add_argument("--value-column", default=None if optional else "value")


def build_parser() -> argparse.ArgumentParser:
    def globals_(suppress: bool):
        # subcommands repeat the global flags; SUPPRESS keeps them from resetting values given earlier
        g = argparse.ArgumentParser(add_help=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--seed", type=int, default=d(0), help="base seed for every random draw")
        g.add_argument("--threads", type=int, default=d(1), help="worker processes for Monte Carlo loops")
        g.add_argument("--output", default=d(None), help="output directory")
        g.add_argument("--config", default=d(None), help="JSON file whose keys set option defaults")
        return g

    common = globals_(suppress=True)
    parser = argparse.ArgumentParser(prog="fixedkern", parents=[globals_(suppress=False)],
                                     description="Kernel smoothing and time-varying AR(1) estimation.")
    sub = parser.add_subparsers(dest="command", required=True)
    kernels = sorted(KERNELS)

    p = sub.add_parser("simulate", parents=[common], help="simulate a time-varying AR(1) series")
    p.add_argument("--T", type=int, default=300)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--phi", type=float, default=None, help="constant coefficient (zero trend); default is the benchmark model")
    p.add_argument("--innovations", default="gaussian", choices=["gaussian", "uniform", "student_t"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", parents=[common], help="two-step fit with fixed bandwidths")
    _add_input(p)
    p.add_argument("--kernel", default="epanechnikov", choices=kernels)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--v", type=float, default=None)
    p.add_argument("--b-T", dest="b_T", type=float, default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cv", parents=[common], help="hv-block cross-validation scores")
    _add_input(p)
    p.add_argument("--kernel", default="epanechnikov", choices=kernels)
    p.add_argument("--h-grid", default=None, help="comma-separated candidates")
    p.add_argument("--v-block", type=int, default=None)
    p.add_argument("--h-gap", type=int, default=None)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("mc-table1", parents=[common], help="Monte Carlo MASE on the benchmark design")
    p.add_argument("--T", default="100,300,700")
    p.add_argument("--sigma2", default="1,3")
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--h", type=float, default=None, help="fixed bandwidth instead of CV")
    p.add_argument("--v", type=float, default=None)
    p.set_defaults(func=cmd_mc_table1)

    p = sub.add_parser("rate-check", parents=[common], help="empirical slope of sup error against the uniform rate")
    p.add_argument("--process", default="iid", help="'iid' or 'ar1:<phi>'")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--T", default="500,1000,2000,4000,8000")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--kernel", default="epanechnikov", choices=kernels)
    p.set_defaults(func=cmd_rate_check)

    p = sub.add_parser("theta", parents=[common], help="bandwidth exponent from mixing and moment parameters")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--mode", default="in_probability", choices=[m.value for m in Mode])
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("diagnose", parents=[common], help="ACF, PACF, Ljung-Box and ARMA BIC of a series")
    _add_input(p)
    p.add_argument("--max-lag", type=int, default=30)
    p.add_argument("--no-arma", action="store_true")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("pipeline", parents=[common], help="full CSV-to-report workflow")
    _add_input(p, optional=True)
    p.add_argument("--kernel", default=None, choices=kernels)
    p.add_argument("--deseasonalize", action="store_true")
    p.add_argument("--harmonics", default=None, help="comma-separated periods in samples")
    p.add_argument("--drift-rate", type=float, default=None, help="linear drift per year to subtract")
    p.add_argument("--h", type=float, default=None, help="fixed trend bandwidth (skips CV)")
    p.add_argument("--v", type=float, default=None)
    p.add_argument("--b-T", dest="b_T", type=float, default=None)
    p.add_argument("--units", default=None)
    p.set_defaults(func=cmd_pipeline)
    return parser


def _read_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"config is not valid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(data, dict):
        raise DataError("config must be a JSON object")
    return data


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.config_data = {}
        if args.config:
            args.config_data = _read_config(args.config)
            if args.command != "pipeline":
                # config keys act as defaults for matching options; explicit flags win
                given = set(a.split("=")[0].lstrip("-").replace("-", "_") for a in (argv or sys.argv[1:]))
                for k, v in args.config_data.items():
                    if not hasattr(args, k):
                        raise _Usage(f"unknown config key {k!r} for {args.command}")
                    if k not in given:
                        setattr(args, k, v)
        if args.threads < 1:
            raise _Usage("--threads must be at least 1")
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"fixedkern: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"fixedkern: data error{_where(exc)}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"fixedkern: numerical error{_where(exc)}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FixedKernError, ValueError) as exc:
        print(f"fixedkern: invalid arguments{_where(exc)}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _where(exc) -> str:
    stage = getattr(exc, "stage", None)
    return f" in stage '{stage}'" if stage else ""


if __name__ == "__main__":
    sys.exit(main())
