"""Unit tests for the domain entities and value objects."""

import math

import numpy as np
import pytest

from arcutoff.domain.errors import ModelValidationError, PreconditionError
from arcutoff.domain.model import Gaussian2, ModelParams, Network, NoiseSpec, SphereState
from arcutoff.domain.model.network import random_network
from arcutoff.domain.model.state import MAX_LN_N
from arcutoff.domain.value_object import ScanMode, ScanPolicy, TruncationPolicy


@pytest.mark.unit
class TestNetwork:

    def test_swap(self, swap):
        assert swap.d == 2
        assert swap.p.tolist() == [[0.0, 1.0], [1.0, 0.0]]

    def test_path_weights(self, path3):
        np.testing.assert_allclose(path3.p, [[0, 1, 0], [0.5, 0, 0.5], [0, 1, 0]])

    def test_rows_must_sum_to_one(self):
        with pytest.raises(ModelValidationError, match="row 2"):
            Network([[0.0, 1.0], [0.9, 0.0]])

    def test_no_self_loops(self):
        with pytest.raises(ModelValidationError):
            Network([[0.5, 0.5], [1.0, 0.0]])

    def test_negative_entries(self):
        with pytest.raises(ModelValidationError):
            Network([[0.0, 1.5, -0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]])

    def test_disconnected(self):
        p = np.zeros((4, 4))
        p[0, 1] = p[1, 0] = p[2, 3] = p[3, 2] = 1.0
        with pytest.raises(ModelValidationError, match="not connected"):
            Network(p)

    def test_one_way_support_is_not_connected(self):
        # 0 -> 1 -> 2 -> 1, node 0 is never reached
        p = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]
        with pytest.raises(ModelValidationError):
            Network(p)

    def test_dimension_one_rejected(self):
        with pytest.raises(ModelValidationError):
            Network([[0.0]])

    def test_read_only(self, swap):
        with pytest.raises(ValueError):
            swap.p[0, 1] = 0.5

    def test_random_network_is_valid(self, rng):
        for d in (2, 3, 5, 8):
            net = random_network(d, rng)
            assert net.d == d
            np.testing.assert_allclose(net.p.sum(axis=1), 1.0)


@pytest.mark.unit
class TestModelParams:

    def test_uniform(self):
        params = ModelParams.uniform(3, 0.4, 2.0)
        assert params.e.tolist() == [0.4] * 3
        assert params.sigma.tolist() == [2.0] * 3
        assert params.noise.is_gaussian

    @pytest.mark.parametrize("e", [0.0, 1.0, -0.1, 1.2])
    def test_damping_bounds(self, e):
        with pytest.raises(ModelValidationError):
            ModelParams([e, 0.5], [1.0, 1.0])

    def test_sigma_positive(self):
        with pytest.raises(ModelValidationError):
            ModelParams([0.5, 0.5], [1.0, 0.0])

    def test_length_mismatch(self):
        with pytest.raises(ModelValidationError):
            ModelParams([0.5, 0.5, 0.5], [1.0, 1.0])

    def test_model_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            ModelParams([1.0, 0.5], [1.0, 1.0])


@pytest.mark.unit
class TestNoiseSpec:

    def test_gaussian_defaults(self):
        noise = NoiseSpec.gaussian()
        assert noise.mean == 0.0
        assert noise.variance == pytest.approx(1.0)

    def test_uniform_variance(self):
        noise = NoiseSpec("uniform", {"half_width": 2.0})
        assert noise.variance == pytest.approx(4.0 / 3.0)

    def test_laplace_variance(self):
        noise = NoiseSpec("laplace", {"scale": 0.5})
        assert noise.variance == pytest.approx(0.5)

    def test_unknown_kind(self):
        with pytest.raises(ModelValidationError):
            NoiseSpec("cauchy")

    def test_unknown_param(self):
        with pytest.raises(ModelValidationError):
            NoiseSpec("gaussian", {"scale": 2.0})

    def test_translation_tv_gaussian(self):
        noise = NoiseSpec.gaussian()
        assert noise.translation_tv([0.0, 0.0]) == pytest.approx(0.0)
        # ||w|| = 2 gives 2 Phi(1) - 1
        assert noise.translation_tv([2.0, 0.0]) == pytest.approx(0.682689492, abs=1e-8)

    def test_translation_tv_uniform(self):
        noise = NoiseSpec("uniform")
        assert noise.translation_tv_1d(1.0) == pytest.approx(0.5)
        assert noise.translation_tv_1d(5.0) == pytest.approx(1.0)

    def test_sample_reproducible(self):
        noise = NoiseSpec("laplace")
        a = noise.sample(np.random.default_rng(3), 10)
        b = noise.sample(np.random.default_rng(3), 10)
        assert a.tolist() == b.tolist()


@pytest.mark.unit
class TestSphereState:

    def test_from_positive(self):
        y = SphereState.from_positive([3.0, 4.0])
        np.testing.assert_allclose(y.to_numpy(), [0.6, 0.8])
        assert y.ratio == pytest.approx(0.75)

    def test_nonpositive(self):
        with pytest.raises(PreconditionError):
            SphereState.from_positive([1.0, 0.0])

    def test_not_unit(self):
        with pytest.raises(ModelValidationError):
            SphereState([0.5, 0.5])

    def test_scaled(self):
        x0 = SphereState.from_positive([3.0, 4.0]).scaled(math.log(10.0))
        np.testing.assert_allclose(x0.to_numpy(), [6.0, 8.0])

    @pytest.mark.parametrize("ln_n", [800.0, MAX_LN_N + 1.0, float("inf"), float("nan")])
    def test_scaled_beyond_float_range(self, ln_n):
        with pytest.raises(PreconditionError, match="float range"):
            SphereState.uniform(2).scaled(ln_n)

    def test_scaled_near_the_limit(self):
        assert np.all(np.isfinite(SphereState.uniform(2).scaled(MAX_LN_N - 1.0).to_numpy()))


@pytest.mark.unit
class TestGaussian2:

    def test_point_mass_is_singular(self):
        assert Gaussian2.point_mass([1.0, 2.0]).is_singular()

    def test_identity_is_regular(self):
        g = Gaussian2([0.0, 0.0], np.eye(2))
        assert not g.is_singular()
        assert g.std.tolist() == [1.0, 1.0]

    def test_not_psd(self):
        with pytest.raises(ModelValidationError):
            Gaussian2([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])

    def test_not_symmetric(self):
        with pytest.raises(ModelValidationError):
            Gaussian2([0.0, 0.0], [[1.0, 0.5], [0.0, 1.0]])


@pytest.mark.unit
class TestScanPolicy:

    def test_cycle_indices(self):
        assert ScanPolicy.cycle().indices(3, 7).tolist() == [0, 1, 2, 0, 1, 2, 0]

    def test_cycle_indices_with_start(self):
        assert ScanPolicy.cycle().indices(2, 3, start=1).tolist() == [1, 0, 1]

    def test_backward_indices_reverse_the_forward_order(self):
        scan = ScanPolicy.cycle()
        # after 5 forward steps on d=3 the updates were 0,1,2,0,1
        assert scan.backward_indices(3, 5, phase=5 % 3).tolist() == [1, 0, 2, 1, 0]

    def test_explicit_sequence(self):
        scan = ScanPolicy.explicit([1, 0, 0])
        assert scan.indices(2, 5).tolist() == [1, 0, 0, 1, 0]
        assert scan.period(2) == (1, 0, 0)
        assert scan.to_dict() == {"mode": "explicit-sequence", "sequence": [2, 1, 1]}

    def test_explicit_validate(self):
        with pytest.raises(ModelValidationError):
            ScanPolicy.explicit([0, 3]).validate(3)

    def test_validate_reports_one_based_entries(self):
        with pytest.raises(ModelValidationError, match=r"entries \[3\] outside 1..2"):
            ScanPolicy.explicit([0, 2]).validate(2)

    def test_require_coverage(self):
        with pytest.raises(PreconditionError, match=r"coordinates \[2\]"):
            ScanPolicy.explicit([0, 0]).require_coverage(2)
        ScanPolicy.explicit([1, 0, 0]).require_coverage(2)
        ScanPolicy.cycle().require_coverage(3)
        ScanPolicy.random().require_coverage(3)

    def test_empty_sequence(self):
        with pytest.raises(ModelValidationError):
            ScanPolicy.explicit([])

    def test_random_needs_generator(self):
        with pytest.raises(ValueError):
            ScanPolicy.random().indices(2, 3)

    def test_random_has_no_period(self):
        with pytest.raises(ValueError):
            ScanPolicy.random().period(2)

    def test_mode_from_string(self):
        assert ScanPolicy("deterministic-cycle").mode is ScanMode.CYCLE


@pytest.mark.unit
class TestTruncationPolicy:

    def test_default_patience_is_dimension(self):
        assert TruncationPolicy.default_for(4).patience == 4

    @pytest.mark.parametrize("kwargs", [
        {"tol": 0.0},
        {"patience": 0},
        {"patience": 5, "max_terms": 4},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ModelValidationError):
            TruncationPolicy(**kwargs)
