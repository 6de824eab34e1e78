import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from fixedkern.errors import InvalidBandwidthError
from fixedkern.kernels import (
    BIWEIGHT,
    EPANECHNIKOV,
    KERNELS,
    TRIANGULAR,
    TRIWEIGHT,
    UNIFORM,
    analytic_moment,
    evaluate,
    evaluate_scaled,
    get_kernel,
    partial_moment,
    riemann_gap,
    support_indices,
)

ALL = list(KERNELS.values())
LIPSCHITZ = [k for k in ALL if k.is_lipschitz]


class TestEvaluate:
    @pytest.mark.parametrize("u, expected", [(0.0, 0.75), (1.5, 0.0), (0.5, 0.5625)])
    def test_epanechnikov_values(self, u, expected):
        assert evaluate(EPANECHNIKOV, u) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("u, h, expected", [(0.0, 0.5, 1.5), (0.6, 0.5, 0.0), (0.25, 0.5, 1.125)])
    def test_scaled(self, u, h, expected):
        assert evaluate_scaled(EPANECHNIKOV, u, h) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("spec", ALL, ids=lambda k: k.family.value)
    def test_exact_zero_outside_support(self, spec):
        u = np.concatenate([np.linspace(1.0 + 1e-15, 50, 1000), -np.linspace(1.0 + 1e-15, 50, 1000)])
        vals = spec(u)
        assert np.all(vals == 0.0)
        assert not np.any(np.signbit(vals))

    @pytest.mark.parametrize("spec", ALL, ids=lambda k: k.family.value)
    def test_bounded_and_symmetric(self, spec):
        u = np.linspace(-1.2, 1.2, 20001)
        vals = spec(u)
        assert np.all(np.abs(vals) <= spec.bound + 1e-15)
        np.testing.assert_array_equal(vals, spec(-u))

    @pytest.mark.parametrize("spec", ALL, ids=lambda k: k.family.value)
    def test_integrates_to_one(self, spec):
        assert analytic_moment(spec, 0) == pytest.approx(1.0, abs=1e-12)
        numeric, _ = quad(lambda w: float(spec(w)), -1, 1, points=[0.0])
        assert numeric == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("spec", LIPSCHITZ, ids=lambda k: k.family.value)
    def test_lipschitz_constant(self, spec):
        u = np.linspace(-1.1, 1.1, 100_001)
        slopes = np.abs(np.diff(spec(u))) / np.diff(u)
        assert slopes.max() <= spec.lipschitz * (1 + 1e-9)
        # the stated constant is attained, not just an upper bound
        assert slopes.max() >= 0.999 * spec.lipschitz

    def test_uniform_flagged_non_lipschitz(self):
        assert not UNIFORM.is_lipschitz
        assert math.isinf(UNIFORM.lipschitz)

    def test_lookup(self):
        assert get_kernel("Epanechnikov") is EPANECHNIKOV
        assert get_kernel(TRIWEIGHT) is TRIWEIGHT
        with pytest.raises(ValueError, match="unknown kernel"):
            get_kernel("gaussian")


class TestSupportIndices:
    def test_interior(self):
        idx = support_indices(100, 0.5, 0.05)
        np.testing.assert_array_equal(idx, np.arange(45, 56))

    def test_left_boundary(self):
        np.testing.assert_array_equal(support_indices(100, 0.0, 0.05), np.arange(1, 6))

    def test_rejects_nonpositive_bandwidth(self):
        with pytest.raises(InvalidBandwidthError):
            support_indices(100, 0.5, 0.0)

    @settings(max_examples=1000, deadline=None)
    @given(
        T=st.integers(2, 20_000),
        x=st.floats(0, 1),
        h=st.floats(1e-4, 0.49),
        L=st.floats(0.5, 2.0),
    )
    def test_cardinality_bound_and_exactness(self, T, x, h, L):
        idx = support_indices(T, x, h, L)
        assert idx.size <= 2 * T * L * h + 1
        full = np.arange(1, T + 1)
        inside = full[np.abs(full / T - x) < L * h * (1 - 1e-9)]
        assert set(inside).issubset(idx)
        assert np.all(np.abs(idx / T - x) <= L * h * (1 + 1e-9))


class TestMoments:
    @pytest.mark.parametrize(
        "j, region, expected",
        [(0, "interior", 1.0), (1, "interior", 0.0), (2, "interior", 0.2),
         (0, "left", 0.5), (1, "left", 0.1875), (2, "left", 0.1),
         (1, "right", -0.1875)],
    )
    def test_epanechnikov(self, j, region, expected):
        assert analytic_moment(EPANECHNIKOV, j, region) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("spec", ALL, ids=lambda k: k.family.value)
    @pytest.mark.parametrize("j", range(5))
    def test_against_quadrature(self, spec, j):
        for region, (a, b) in {"interior": (-1, 1), "left": (0, 1), "right": (-1, 0)}.items():
            ref, _ = quad(lambda w: float(spec(w)) * w**j, a, b, points=[0.0] if a < 0 < b else None)
            assert analytic_moment(spec, j, region) == pytest.approx(ref, abs=1e-12)

    def test_power_cap(self):
        with pytest.raises(NotImplementedError):
            analytic_moment(EPANECHNIKOV, 5)

    @given(a=st.floats(-2, 2), b=st.floats(-2, 2))
    def test_partial_moment_quadrature(self, a, b):
        ref, _ = quad(lambda w: float(BIWEIGHT(w)) * w**2, max(a, -1), min(b, 1)) if b > a else (0.0, 0)
        assert partial_moment(BIWEIGHT, 2, a, b) == pytest.approx(ref, abs=1e-12)


class TestRiemannGap:
    def test_interior_small(self):
        T = 1000
        assert riemann_gap(EPANECHNIKOV, T, 0.5, 0.1, 0) <= 10 / T

    def test_bounded_when_window_is_wide(self):
        gap = riemann_gap(EPANECHNIKOV, 7, 0.5, 0.25, 0)
        assert math.isfinite(gap) and gap < 1

    def test_first_order_decay_at_left_edge(self):
        # at x = 0 the truncated kernel jumps, so the gap is exactly first order in 1/T
        gaps = [riemann_gap(EPANECHNIKOV, T, 0.0, 0.1, 0) for T in (500, 1000, 2000, 4000)]
        ratios = np.array(gaps[:-1]) / np.array(gaps[1:])
        assert np.all((ratios >= 1.5) & (ratios <= 2.5))

    @pytest.mark.parametrize("j", [0, 1, 2])
    def test_worst_case_over_grid_is_first_order(self, j):
        x = np.linspace(0, 1, 201)
        worst = [max(riemann_gap(EPANECHNIKOV, T, xi, 0.1, j) for xi in x) for T in (500, 1000, 2000)]
        ratios = np.array(worst[:-1]) / np.array(worst[1:])
        assert np.all((ratios >= 1.5) & (ratios <= 2.5))

    def test_interior_decays_faster(self):
        # continuous integrand: the midpoint-like sum is second order
        g1, g2 = (riemann_gap(EPANECHNIKOV, T, 0.5, 0.1, 0) for T in (1000, 2000))
        assert g1 / g2 >= 3.0

    @pytest.mark.parametrize("spec", [EPANECHNIKOV, TRIANGULAR, BIWEIGHT], ids=lambda k: k.family.value)
    def test_scaled_gap_bounded_over_grid(self, spec):
        x = np.linspace(0, 1, 101)
        worst = [max(riemann_gap(spec, T, xi, 0.1, 1) for xi in x) * T for T in (1000, 10_000)]
        assert max(worst) < 5.0
        assert worst[1] <= 1.5 * worst[0]

    def test_matches_brute_force_quadrature(self):
        T, x, h, j = 300, 0.03, 0.1, 2
        f = lambda u: float(EPANECHNIKOV((u - x) / h)) * ((u - x) / h) ** j
        ref_int, _ = quad(f, 0, 1, points=[x, x + h], limit=200, epsabs=1e-14)
        ref_sum = sum(f(i / T) for i in range(1, T + 1)) / T
        assert riemann_gap(EPANECHNIKOV, T, x, h, j) == pytest.approx(abs(ref_sum - ref_int), abs=1e-12)

    def test_rejects_large_bandwidth(self):
        with pytest.raises(InvalidBandwidthError):
            riemann_gap(EPANECHNIKOV, 100, 0.5, 0.5, 0)
