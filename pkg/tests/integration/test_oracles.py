"""Cross-module oracles: brackets against the exact pipeline, samplers against each other."""

import math

import numpy as np
import pytest

from arcutoff.domain.model import StateVec
from arcutoff.domain.service.cutoff_lab import cutoff_profile, tv_bracket_series
from arcutoff.domain.service.gaussian_exact import stationary_gaussian, tv_curve_exact
from arcutoff.domain.service.model_core import simulate_forward_batch
from arcutoff.domain.service.stationary_sampler import sample_stationary_batch
from arcutoff.infrastructure.config import DEFAULT_LN_N

LN_055 = math.log(0.55)


@pytest.mark.integration
class TestSandwich:

    def test_brackets_hold_the_exact_curve(self, swap, d2_params, uniform2, cycle):
        ln_n = math.log(1000.0)
        ks = [2, 4, 6, 8, 10, 12, 14, 16, 20, 30]
        x0 = StateVec(1000.0 * uniform2.to_numpy())
        brackets = tv_bracket_series(swap, d2_params, x0, ks, 2_000, seed=11, scan=cycle)
        curve = tv_curve_exact(swap, d2_params, ln_n, uniform2, ks[-1])
        for b in brackets:
            exact = curve.points[b.k]
            assert b.lower - b.lower_ci <= exact.tv + exact.err + 1e-9, b.k
            assert exact.tv - exact.err - 1e-9 <= b.upper + b.upper_ci, b.k
            assert b.consistent

    def test_bracket_is_informative_around_cutoff(self, swap, d2_params, uniform2, cycle):
        x0 = StateVec(1000.0 * uniform2.to_numpy())
        early, late = tv_bracket_series(swap, d2_params, x0, [4, 40], 2_000, seed=12,
                                        scan=cycle)
        assert early.lower > 0.9
        assert late.upper < 0.1


@pytest.mark.integration
class TestSamplersAgree:

    def test_long_forward_run_reaches_the_exact_law(self, swap, d2_params, cycle):
        x = simulate_forward_batch(swap, d2_params, [50.0, -50.0], 60, cycle, seed=13,
                                   replicas=40_000)
        target = stationary_gaussian(swap, d2_params, parity=1)
        np.testing.assert_allclose(np.cov(x, rowvar=False), target.cov, rtol=0.05)
        assert np.all(np.abs(x.mean(axis=0)) < 0.05)

    def test_backward_draws_match_the_exact_law(self, swap, d2_params, cycle):
        for phase, parity in ((0, 1), (1, 0)):
            x = sample_stationary_batch(swap, d2_params, 40_000, seed=14, scan=cycle,
                                        phase=phase).samples
            target = stationary_gaussian(swap, d2_params, parity=parity)
            np.testing.assert_allclose(np.cov(x, rowvar=False), target.cov, rtol=0.05)


@pytest.mark.integration
class TestProfile:

    def test_crossing_spacing_on_default_grid(self, swap, d2_params, uniform2, cycle):
        profile = cutoff_profile(swap, d2_params, uniform2, DEFAULT_LN_N, [0.0], LN_055,
                                 scan=cycle, alpha_source="exact-reference")
        assert len(profile.spacings) == 9
        for spacing in profile.spacings:
            assert 2.55 <= spacing <= 2.90
        predicted = math.log(5.0) / -LN_055
        assert profile.mean_spacing == pytest.approx(predicted, rel=0.05)

    def test_beta_limits_at_largest_n(self, swap, d2_params, uniform2, cycle):
        profile = cutoff_profile(swap, d2_params, uniform2, [DEFAULT_LN_N[-1]], [-5.0, 5.0],
                                 LN_055, scan=cycle)
        low, high = profile.rows
        assert low.tv_exact >= 0.9
        assert high.tv_exact <= 0.1

    def test_tv_decreasing_in_beta(self, swap, d2_params, uniform2, cycle):
        betas = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]
        profile = cutoff_profile(swap, d2_params, uniform2, [DEFAULT_LN_N[5]], betas, LN_055,
                                 scan=cycle)
        tvs = [row.tv_exact for row in profile.rows]
        assert all(b <= a + 1e-6 for a, b in zip(tvs, tvs[1:]))
