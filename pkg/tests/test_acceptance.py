"""End-to-end acceptance checks.

Each test carries a ``criterion`` marker; ``conftest.py`` prints one
PASS/FAIL line per criterion in the terminal summary.  Run them alone with
``pytest tests/test_acceptance.py``.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.signal import lfilter

from fixedkern.averages import design_moment, moment_matrix
from fixedkern.cli import EXIT_DATA, main
from fixedkern.diagnostics import acf, bic_grid, chi2_cdf, ljung_box
from fixedkern.errors import InvalidParamsError
from fixedkern.experiments import (
    REFERENCE_MASE,
    Mode,
    RateParams,
    benchmark_trend,
    mc_table1,
    theta,
    verify_rate,
)
from fixedkern.kernels import EPANECHNIKOV, partial_moment, riemann_gap
from fixedkern.local_linear import eigen_floor, fit_local_linear, weights
from fixedkern.pipeline import PipelineConfig, run_pipeline
from fixedkern.tvar import TvarModel, fit_two_step, simulate

GRID = np.linspace(0.0, 1.0, 201)
pytestmark = pytest.mark.acceptance


@pytest.mark.criterion(1, "equivalent-kernel weights sum to one and annihilate the linear term")
def test_weight_identities():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst_sum = worst_lin = 0.0
    for _ in range(500):
        T = int(rng.integers(50, 5001))
        # log-uniform h with at least 10 design points per half-window
        h = math.exp(rng.uniform(math.log(10 / T), math.log(0.45)))
        u = np.arange(1, T + 1) / T
        for x in GRID:
            w = weights(EPANECHNIKOV, T, x, h)
            worst_sum = max(worst_sum, abs(w.sum() - 1.0))
            worst_lin = max(worst_lin, abs(np.dot(w, u - x)))
    elapsed = time.perf_counter() - start
    print(f"max |sum W - 1| = {worst_sum:.2e}, max |sum W (u - x)| = {worst_lin:.2e}, {elapsed:.1f}s")
    assert worst_sum <= 1e-10 and worst_lin <= 1e-10
    assert elapsed < 30


@pytest.mark.criterion(2, "local-linear fit reproduces affine data, boundaries included")
@pytest.mark.parametrize("T, h", [(60, 0.1), (500, 0.05), (3000, 0.3)])
def test_affine_reproduction(T, h):
    y = -4.2 + 7.5 * np.arange(1, T + 1) / T
    fit = fit_local_linear(y, EPANECHNIKOV, h, GRID)
    assert np.max(np.abs(fit.values - (-4.2 + 7.5 * GRID))) <= 1e-8


@pytest.mark.criterion(3, "Riemann gap and design-moment error shrink like 1/T")
def test_riemann_scaling():
    h = 0.1
    worst = {}
    for T in (1_000, 2_000, 10_000, 20_000, 100_000):
        gaps = [riemann_gap(EPANECHNIKOV, T, x, h, j) for j in (0, 1, 2) for x in GRID]
        moment_err = [abs(design_moment(EPANECHNIKOV, T, x, h, j)
                          - partial_moment(EPANECHNIKOV, j, -x / h, (1 - x) / h)) * T * h
                      for j in (0, 1, 2) for x in GRID]
        worst[T] = (max(gaps), max(moment_err))
    scaled = [T * g for T, (g, _) in worst.items()]
    moments = [m for _, m in worst.values()]
    print("T*gap:", np.round(scaled, 4), "|s - mu| T h:", np.round(moments, 4))
    assert max(scaled) <= 2 * min(scaled) and max(scaled) < 5
    assert max(moments) <= 2 * min(moments) and max(moments) < 5
    for T in (1_000, 10_000):
        assert worst[T][0] / worst[2 * T][0] >= 1.5


@pytest.mark.criterion(4, "eigenvalue floor of the local-linear moment matrix")
def test_eigen_floor():
    for T, Th in [(500, 50), (1_000, 50), (1_000, 120), (5_000, 50), (5_000, 1_000)]:
        assert eigen_floor(EPANECHNIKOV, T, Th / T, GRID) >= 0.02
    # [[1/2, 3/16], [3/16, 1/10]] at the boundary
    limit = 0.3 - math.sqrt(0.2**2 + (3 / 16) ** 2)
    assert limit == pytest.approx(0.02585, abs=1e-5)
    S = moment_matrix(EPANECHNIKOV, 100_000, 0.0, 0.05)
    assert abs(S.lambda_min / 0.02585 - 1) <= 0.10
    v = np.random.default_rng(4).standard_normal((10_000, 2))
    sol = np.array([S.solve(row) for row in v])
    assert np.all(np.linalg.norm(sol, axis=1) <= np.linalg.norm(v, axis=1) / S.lambda_min * (1 + 1e-12))


@pytest.mark.slow
@pytest.mark.criterion(5, "Monte Carlo trend and coefficient errors with cross-validated bandwidths")
def test_monte_carlo_table():
    reps = mc_table1((100, 300, 700), (1.0, 3.0), n_reps=200, seed_base=0, bandwidth_mode="cv")
    for sigma2 in (1.0, 3.0):
        cells = [r for r in reps if r.sigma2 == sigma2]
        for r in cells:
            ref_g, ref_phi = REFERENCE_MASE[(r.T, sigma2)]
            print(f"T={r.T} sigma2={sigma2}: mase_g {r.mase_g:.3f} (ref {ref_g}), "
                  f"mase_phi {r.mase_phi:.4f} (ref {ref_phi})")
            assert abs(r.mase_g / ref_g - 1) <= 0.35
            assert ref_phi / 3 <= r.mase_phi <= 3 * ref_phi
        assert all(b.mase_g < a.mase_g for a, b in zip(cells, cells[1:]))
        assert all(b.mase_phi < a.mase_phi for a, b in zip(cells, cells[1:]))


@pytest.mark.slow
@pytest.mark.criterion(6, "sup-norm of kernel averages decays at the uniform rate")
@pytest.mark.parametrize("process, lo, hi, min_r2", [("iid", 0.85, 1.15, 0.95), ("ar1:0.75", 0.8, 1.2, 0.0)])
def test_uniform_rate(process, lo, hi, min_r2):
    rep = verify_rate(EPANECHNIKOV, process, 0, (500, 1000, 2000, 4000, 8000), n_reps=100, seed=0)
    print(f"{rep.process}: slope {rep.slope:.3f}, R^2 {rep.r2:.3f}")
    assert lo <= rep.slope <= hi
    assert rep.r2 > min_r2


@pytest.mark.criterion(7, "bandwidth-admissibility exponent")
def test_theta_calculator():
    assert theta(RateParams(beta=10, s=4, m=0, c=1)).theta == pytest.approx(float(Fraction(13, 41)), abs=1e-12)
    rng = np.random.default_rng(7)
    seen = 0
    for _ in range(20_000):
        almost_sure = bool(rng.integers(2))
        s = rng.uniform(4.01 if almost_sure else 2.01, 100)
        p = RateParams(beta=math.exp(rng.uniform(math.log(2.01), math.log(1e6))), s=s,
                       m=int(rng.integers(0, 4)), c=rng.uniform(0.05, 4),
                       mode=Mode.ALMOST_SURE if almost_sure else Mode.IN_PROBABILITY)
        res = theta(p)
        if res.admissible:
            seen += 1
            assert 0 < res.theta < 1
    assert seen > 1_000
    for mode, s in [(Mode.IN_PROBABILITY, 2.0), (Mode.IN_PROBABILITY, 1.5), (Mode.ALMOST_SURE, 4.0)]:
        with pytest.raises(InvalidParamsError):
            RateParams(beta=50, s=s, mode=mode)


@pytest.mark.slow
@pytest.mark.criterion(8, "local-constant coefficient is consistent and scale invariant")
def test_phi_consistency():
    T, h = 10_000, 0.1
    model = TvarModel.constant(benchmark_trend, 0.75)
    hits = 0
    for seed in range(50):
        fit = fit_two_step(simulate(model, T, seed=[8, seed]), EPANECHNIKOV, None, h)
        hits += np.max(np.abs(fit.phi_hat.values - 0.75)) <= 0.05
    print(f"sup interior error <= 0.05 in {hits}/50 seeds")
    assert hits >= 45
    y = simulate(model, 2_000, seed=3)
    base = fit_two_step(y, EPANECHNIKOV, None, 0.15).phi_hat.values
    for c in (1e-3, 7.0, 1e4):
        scaled = fit_two_step(c * y.values, EPANECHNIKOV, None, 0.15).phi_hat.values
        np.testing.assert_allclose(scaled, base, rtol=0, atol=1e-12)


@pytest.mark.slow
@pytest.mark.criterion(9, "autocorrelation, chi-squared, BIC order selection and Ljung-Box size")
def test_diagnostics():
    assert acf([1, 2, 3, 4], 1)[0] == pytest.approx(0.25, abs=1e-15)
    for q, df, level in [(3.841, 1, 0.95), (5.991, 2, 0.95), (18.307, 10, 0.95),
                         (2.706, 1, 0.90), (9.488, 4, 0.95), (31.410, 20, 0.95)]:
        assert chi2_cdf(q, df) == pytest.approx(level, abs=1e-3)
    hits = 0
    for seed in range(100):
        e = np.random.default_rng([9, seed]).standard_normal(5_200)
        x = lfilter([1.0], [1.0, -0.75], e)[200:]
        hits += bic_grid(x)[1] == (1, 0)
    rejections = np.mean([ljung_box(np.random.default_rng([10, s]).standard_normal(10_000), [10])[0][2] < 0.05
                          for s in range(200)])
    print(f"BIC picks AR(1) in {hits}/100 seeds; Ljung-Box rejection rate {rejections:.3f}")
    assert hits >= 90
    assert 0.02 <= rejections <= 0.09


@pytest.mark.criterion(10, "pipeline output is byte-reproducible and malformed input exits with the data code")
def test_pipeline_determinism(fixture_csv, tmp_path):
    for run in ("a", "b"):
        run_pipeline(PipelineConfig(str(fixture_csv), value_column="sla_mm", deseasonalize=True,
                                    output_dir=str(tmp_path / run)))
    for name in ("curves.csv", "diagnostics.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    malformed = sorted((fixture_csv.parent / "malformed").glob("*.csv"))
    assert len(malformed) == 5
    for path in malformed:
        assert main(["pipeline", str(path), "--value-column", "sla_mm", "--output", str(tmp_path / "bad")]) == EXIT_DATA
