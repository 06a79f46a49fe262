"""Property-based tests over random networks and parameters."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis.strategies import composite, floats, integers, lists

from arcutoff.domain.model import Gaussian2, ModelParams
from arcutoff.domain.model.network import random_network
from arcutoff.domain.service.cutoff_lab import coupon_tail_exact, schedule_k
from arcutoff.domain.service.gaussian_exact import tv_gaussian
from arcutoff.domain.service.model_core import apply_a, chain_step
from arcutoff.domain.service.sphere_walk import (
    hilbert_distance,
    project,
    ratio_bound_check,
    sphere_step,
)


@composite
def models(draw, max_d=6):
    d = draw(integers(2, max_d))
    rng = np.random.default_rng(draw(integers(0, 2 ** 32 - 1)))
    net = random_network(d, rng)
    e = draw(lists(floats(0.05, 0.95), min_size=d, max_size=d))
    sigma = draw(lists(floats(0.1, 5.0), min_size=d, max_size=d))
    return net, ModelParams(e, sigma)


def _vector(draw, d, lo=-100.0, hi=100.0):
    return np.array(draw(lists(floats(lo, hi), min_size=d, max_size=d)))


@composite
def model_with_vectors(draw):
    net, params = draw(models())
    d = net.d
    return net, params, _vector(draw, d), _vector(draw, d), draw(integers(0, d - 1))


@composite
def model_with_positive(draw, max_d=6):
    net, params = draw(models(max_d))
    d = net.d
    y = _vector(draw, d, 0.01, 10.0)
    seq = draw(lists(integers(0, d - 1), max_size=30))
    return net, params, y, seq


positive_vectors = lists(floats(0.01, 10.0), min_size=3, max_size=3).map(np.array)


@pytest.mark.unit
class TestChainProperties:

    @given(model_with_vectors(), floats(-3.0, 3.0), floats(-3.0, 3.0))
    @settings(max_examples=50, deadline=None)
    def test_update_is_linear(self, case, a, b):
        net, params, x, y, i = case
        lhs = apply_a(net, params, i, a * x + b * y).to_numpy()
        rhs = a * apply_a(net, params, i, x).to_numpy() + b * apply_a(net, params, i, y).to_numpy()
        np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9)

    @given(model_with_vectors())
    @settings(max_examples=50, deadline=None)
    def test_only_coordinate_i_moves(self, case):
        net, params, x, _, i = case
        out = chain_step(net, params, x, i, 0.7).to_numpy()
        mask = np.arange(net.d) != i
        assert np.array_equal(out[mask], x[mask])

    @given(model_with_positive())
    @settings(max_examples=50, deadline=None)
    def test_positivity_preserved(self, case):
        net, params, y, seq = case
        x = y.copy()
        for i in seq:
            x = apply_a(net, params, i, x).to_numpy()
        assert np.all(x > 0)

    @given(model_with_positive())
    @settings(max_examples=50, deadline=None)
    def test_sphere_walk_stays_on_sphere(self, case):
        net, params, y, seq = case
        state = project(y)
        for i in seq:
            state, _ = sphere_step(net, params, state, i)
        assert abs(np.linalg.norm(state.to_numpy()) - 1.0) <= 1e-12

    @given(model_with_positive())
    @settings(max_examples=50, deadline=None)
    def test_sphere_step_is_projected_update(self, case):
        net, params, y, seq = case
        i = seq[0] if seq else 0
        state, log_factor = sphere_step(net, params, project(y), i)
        x = apply_a(net, params, i, y).to_numpy()
        np.testing.assert_allclose(state.to_numpy(), project(x).to_numpy(),
                                   rtol=1e-12, atol=1e-14)
        expected = math.log(np.linalg.norm(x) / np.linalg.norm(y))
        assert log_factor == pytest.approx(expected, abs=1e-12)

    @given(model_with_positive(max_d=4))
    @settings(max_examples=50, deadline=None)
    def test_ratio_bound(self, case):
        net, params, y, seq = case
        assert ratio_bound_check(net, params, y, seq[:8]).holds


@pytest.mark.unit
class TestHilbertProperties:

    @given(positive_vectors, positive_vectors)
    def test_symmetric_and_nonnegative(self, a, b):
        h = hilbert_distance(a, b)
        assert h >= 0.0
        assert h == pytest.approx(hilbert_distance(b, a), abs=1e-12)

    @given(positive_vectors, positive_vectors, positive_vectors)
    def test_triangle(self, a, b, c):
        assert hilbert_distance(a, c) <= hilbert_distance(a, b) + hilbert_distance(b, c) + 1e-9


@pytest.mark.unit
class TestScheduleProperties:

    @given(floats(0.1, 30.0), floats(-5.0, 5.0), floats(0.0, 3.0), floats(-2.0, -0.05))
    def test_monotone_in_beta(self, ln_n, beta, step, alpha):
        assert schedule_k(ln_n, beta, alpha).k <= schedule_k(ln_n, beta + step, alpha).k

    @given(floats(0.1, 30.0), floats(-5.0, 5.0), floats(0.0, 10.0), floats(-2.0, -0.05))
    def test_monotone_in_ln_n(self, ln_n, beta, step, alpha):
        assert schedule_k(ln_n, beta, alpha).k <= schedule_k(ln_n + step, beta, alpha).k

    @given(integers(1, 8), integers(0, 60))
    def test_coupon_tail_is_a_probability(self, d, k):
        p = coupon_tail_exact(d, k)
        assert 0.0 <= p <= 1.0
        assert coupon_tail_exact(d, k + 1) <= p + 1e-12


@pytest.mark.unit
class TestTVProperties:

    @given(floats(-5.0, 5.0), floats(-5.0, 5.0), floats(0.2, 3.0), floats(-0.9, 0.9))
    @settings(max_examples=50, deadline=None)
    def test_closed_form_bounds(self, mx, my, scale, rho):
        cov = scale * np.array([[1.0, rho], [rho, 1.0]])
        tv = tv_gaussian(Gaussian2([0.0, 0.0], cov), Gaussian2([mx, my], cov)).tv
        assert 0.0 <= tv <= 1.0
        if math.hypot(mx, my) == 0.0:
            assert tv == pytest.approx(0.0, abs=1e-12)
