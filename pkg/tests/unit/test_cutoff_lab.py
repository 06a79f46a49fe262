"""Unit tests for the cutoff schedule, the TV brackets and the profile sweep."""

import math

import numpy as np
import pytest

from arcutoff.domain.errors import PreconditionError
from arcutoff.domain.model import ModelParams, SphereState
from arcutoff.domain.service.cutoff_lab import (
    coupon_tail_empirical,
    coupon_tail_exact,
    cutoff_profile,
    default_radius_grid,
    exact_mode,
    schedule_k,
    tv_bracket,
    tv_lower_bound_ball,
    tv_upper_bound_coupling,
)

LN_1000 = math.log(1000.0)
LN_055 = math.log(0.55)


@pytest.mark.unit
class TestSchedule:

    def test_exact_alpha(self):
        s = schedule_k(LN_1000, 0.0, LN_055)
        assert s.k == 12
        assert s.raw == pytest.approx(11.554, abs=1e-3)
        assert not s.clamped

    def test_reported_alpha(self):
        s = schedule_k(LN_1000, 0.0, -0.588)
        assert s.k == 12
        assert s.raw == pytest.approx(11.748, abs=1e-3)

    def test_clamped(self):
        s = schedule_k(LN_1000, -10.0, LN_055)
        assert s.k == 0
        assert s.clamped
        assert s.raw < 0

    def test_ties_round_to_even(self):
        # (1 + 0) / 0.4 = 2.5
        assert schedule_k(1.0, 0.0, -0.4).k == 2

    @pytest.mark.parametrize("alpha", [0.0, 0.1, float("nan")])
    def test_alpha_must_be_negative(self, alpha):
        with pytest.raises(PreconditionError):
            schedule_k(LN_1000, 0.0, alpha)

    def test_ln_n_positive(self):
        with pytest.raises(PreconditionError):
            schedule_k(0.0, 0.0, LN_055)


@pytest.mark.unit
class TestCouponCollector:

    def test_exact_small_cases(self):
        assert coupon_tail_exact(2, 1) == pytest.approx(1.0)
        assert coupon_tail_exact(3, 2) == pytest.approx(1.0)
        assert coupon_tail_exact(2, 5) == pytest.approx(2.0 ** -4)

    def test_exact_three_coupons(self):
        expected = 3 * (2 / 3) ** 6 - 3 * (1 / 3) ** 6
        assert coupon_tail_exact(3, 6) == pytest.approx(expected)

    def test_empirical_matches_exact(self):
        p, se = coupon_tail_empirical(3, 6, 20_000, seed=1)
        assert abs(p - coupon_tail_exact(3, 6)) <= 3.5 * se


@pytest.mark.unit
class TestLowerBound:

    def test_far_start_is_separated(self, swap, d2_params, cycle):
        x0 = np.array([1e6, 0.0])
        bound = tv_lower_bound_ball(swap, d2_params, x0, 0, [10.0], 2_000, seed=1, scan=cycle)
        assert bound.lower >= 0.99
        assert bound.radius == 10.0
        assert len(bound.per_radius) == 1

    def test_default_grid(self, swap, d2_params, cycle):
        bound = tv_lower_bound_ball(swap, d2_params, [1000.0, 1000.0], 4, None, 1_000, seed=2,
                                    scan=cycle)
        assert len(bound.per_radius) == 10
        radii = [row["radius"] for row in bound.per_radius]
        assert radii == sorted(radii)

    def test_mixed_chain_has_small_lower_bound(self, swap, d2_params, cycle):
        bound = tv_lower_bound_ball(swap, d2_params, [1000.0, 1000.0], 200, None, 5_000, seed=3,
                                    scan=cycle)
        assert bound.lower <= 2 * bound.lower_ci

    def test_empty_grid(self, swap, d2_params):
        with pytest.raises(PreconditionError):
            tv_lower_bound_ball(swap, d2_params, [1.0, 1.0], 3, [], 1_000, seed=0)

    def test_replica_minimum(self, swap, d2_params):
        with pytest.raises(PreconditionError):
            tv_lower_bound_ball(swap, d2_params, [1.0, 1.0], 3, [1.0], 100, seed=0)

    def test_radius_grid_range(self, rng):
        draws = rng.normal(size=(5_000, 2))
        radii = default_radius_grid(draws)
        norms = np.linalg.norm(draws, axis=1)
        assert radii[0] == pytest.approx(np.percentile(norms, 50))
        assert radii[-1] == pytest.approx(np.percentile(norms, 99.9))


@pytest.mark.unit
class TestUpperBound:

    def test_fewer_steps_than_coordinates(self, complete3, d3_params):
        bound = tv_upper_bound_coupling(complete3, d3_params, [1.0, 1.0, 1.0], 2, 1_000, seed=0)
        assert bound.upper == 1.0
        assert bound.p_uncollected == 1.0

    def test_huge_noise_scale(self, swap, cycle):
        params = ModelParams.uniform(2, 0.55, 1e6)
        x0 = 1000.0 * SphereState.uniform(2).to_numpy()
        bound = tv_upper_bound_coupling(swap, params, x0, 4, 2_000, seed=1, scan=cycle)
        assert bound.upper < 0.1
        assert bound.p_uncollected == 0.0

    def test_uncollected_fraction(self, swap, d2_params, random_scan):
        bound = tv_upper_bound_coupling(swap, d2_params, [1.0, 1.0], 2, 4_000, seed=2,
                                        scan=random_scan)
        assert bound.p_uncollected == pytest.approx(0.5, abs=0.05)
        assert bound.upper >= bound.p_uncollected

    def test_decreases_with_time(self, complete3, d3_params, random_scan):
        x0 = [100.0, -50.0, 20.0]
        early = tv_upper_bound_coupling(complete3, d3_params, x0, 6, 2_000, seed=3,
                                        scan=random_scan)
        late = tv_upper_bound_coupling(complete3, d3_params, x0, 40, 2_000, seed=3,
                                       scan=random_scan)
        assert late.upper <= early.upper + early.upper_ci + late.upper_ci

    def test_thread_independent(self, complete3, d3_params, random_scan):
        a = tv_upper_bound_coupling(complete3, d3_params, [5.0, 0.0, 0.0], 9, 1_500, seed=4,
                                    scan=random_scan, threads=1, chunk=256)
        b = tv_upper_bound_coupling(complete3, d3_params, [5.0, 0.0, 0.0], 9, 1_500, seed=4,
                                    scan=random_scan, threads=3, chunk=256)
        assert a.upper == b.upper

    def test_replica_minimum(self, swap, d2_params):
        with pytest.raises(PreconditionError):
            tv_upper_bound_coupling(swap, d2_params, [1.0, 1.0], 5, 10, seed=0)


@pytest.mark.unit
class TestBracket:

    def test_consistent_and_clamped_range(self, complete3, d3_params, random_scan):
        bracket = tv_bracket(complete3, d3_params, [50.0, 50.0, 50.0], 8, 2_000, seed=5,
                             scan=random_scan)
        assert 0.0 <= bracket.lower <= 1.0
        assert 0.0 <= bracket.upper <= 1.0
        assert bracket.consistent

    def test_exact_mode(self, swap, d2_params, complete3, d3_params, cycle, random_scan):
        assert exact_mode(swap, d2_params, cycle)
        assert not exact_mode(swap, d2_params, random_scan)
        assert not exact_mode(complete3, d3_params, cycle)


@pytest.mark.unit
class TestProfile:

    def test_exact_profile_spacing(self, swap, d2_params, uniform2, cycle):
        ln_n = [LN_1000, LN_1000 + math.log(5.0)]
        profile = cutoff_profile(swap, d2_params, uniform2, ln_n, [-1.0, 0.0, 1.0], LN_055,
                                 scan=cycle, alpha_source="exact-reference")
        assert len(profile.rows) == 6
        assert all(row.method == "exact" for row in profile.rows)
        assert profile.alpha_source == "exact-reference"
        assert len(profile.spacings) == 1
        assert 2.55 <= profile.spacings[0] <= 2.90
        assert profile.predicted_spacings[0] == pytest.approx(math.log(5.0) / -LN_055)
        tvs = [row.tv_exact for row in profile.rows[:3]]
        assert tvs[0] >= tvs[1] >= tvs[2]

    def test_bracket_profile(self, complete3, d3_params, random_scan):
        direction = SphereState.uniform(3)
        profile = cutoff_profile(complete3, d3_params, direction, [math.log(10.0)], [0.0],
                                 -0.3, replicas=1_000, seed=6, scan=random_scan)
        (row,) = profile.rows
        assert row.method == "bracket"
        assert row.k == 8
        assert row.tv_exact is None
        assert row.tv_lower <= row.tv_upper + row.lower_ci + row.upper_ci
        assert profile.spacings == []

    def test_start_beyond_float_range(self, swap, d2_params, uniform2, cycle,
                                      complete3, d3_params, random_scan):
        with pytest.raises(PreconditionError, match="float range"):
            cutoff_profile(swap, d2_params, uniform2, [800.0], [0.0], LN_055, scan=cycle)
        with pytest.raises(PreconditionError, match="float range"):
            cutoff_profile(complete3, d3_params, SphereState.uniform(3), [800.0], [0.0], -0.3,
                           replicas=1_000, scan=random_scan)
