import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from circindep import (
    PairedCircSample,
    UndefinedMeanError,
    axial_to_circular,
    center_sample,
    circular_mean,
    lag_pairs,
    trig_moments,
    weighted_circular_mean,
    wrap_angle,
)

from .conftest import paired_samples, shifts

PI = np.pi


class TestWrapAngle:
    @pytest.mark.parametrize(
        "x, expected",
        [(3 * PI / 2, -PI / 2), (-PI, -PI), (2 * PI, 0.0), (PI, -PI), (0.0, 0.0), (-3 * PI, -PI)],
    )
    def test_examples(self, x, expected):
        assert_allclose(wrap_angle(x), expected, atol=1e-15)

    def test_scalar_in_scalar_out(self):
        assert isinstance(wrap_angle(1.0), float)
        assert wrap_angle(np.array([1.0, 7.0])).shape == (2,)

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(ValueError):
            wrap_angle(bad)

    @given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
    def test_range_and_period(self, x):
        w = wrap_angle(x)
        assert -PI <= w < PI
        # wrap(x + 2 pi) == wrap(x) up to the rounding of x + 2 pi itself
        d = wrap_angle(wrap_angle(x + 2 * PI) - w)
        assert abs(d) <= 1e-12 * max(1.0, abs(x))

    @given(st.floats(min_value=-PI, max_value=PI, exclude_max=True, allow_nan=False))
    def test_identity_inside_range(self, x):
        assert wrap_angle(x) == x

    def test_tiny_negative_stays_in_range(self):
        w = wrap_angle(-1e-300)
        assert -PI <= w < PI


class TestCircularMean:
    @pytest.mark.parametrize(
        "angles, expected",
        [([PI / 2, PI / 2], PI / 2), ([0.0, PI / 2], PI / 4), ([3.0, -3.0], -PI)],
    )
    def test_examples(self, angles, expected):
        assert_allclose(circular_mean(angles), expected, atol=1e-12)

    def test_zero_resultant(self):
        with pytest.raises(UndefinedMeanError):
            circular_mean([0.0, PI])

    def test_empty(self):
        with pytest.raises(ValueError):
            circular_mean([])


class TestWeightedCircularMean:
    @pytest.mark.parametrize(
        "angles, weights, expected",
        [
            ([0.0, PI / 2], [1, 0], 0.0),
            ([PI / 4, PI / 4], [2, 3], PI / 4),
            ([0.0, PI / 2], [1, 1], PI / 4),
        ],
    )
    def test_examples(self, angles, weights, expected):
        assert_allclose(weighted_circular_mean(angles, weights), expected, atol=1e-12)

    def test_negative_weight(self):
        with pytest.raises(ValueError):
            weighted_circular_mean([0.0, 1.0], [1.0, -0.5])

    def test_all_zero_weights(self):
        with pytest.raises(ValueError):
            weighted_circular_mean([0.0, 1.0], [0.0, 0.0])

    def test_zero_weighted_resultant(self):
        with pytest.raises(UndefinedMeanError):
            weighted_circular_mean([0.0, PI, 1.0], [2.0, 2.0, 0.0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            weighted_circular_mean([0.0, 1.0], [1.0])


class TestPairedCircSample:
    def test_wraps_and_freezes(self):
        s = PairedCircSample([2 * PI, PI], [-PI, 3 * PI / 2])
        assert_allclose(s.theta1, [0.0, -PI], atol=1e-15)
        assert_allclose(s.theta2, [-PI, -PI / 2], atol=1e-15)
        with pytest.raises(ValueError):
            s.theta1[0] = 1.0

    def test_input_not_aliased(self):
        x = np.array([0.1, 0.2])
        s = PairedCircSample(x, x)
        x[0] = 3.0
        assert s.theta1[0] == 0.1

    @pytest.mark.parametrize("t1, t2", [([0.0, 1.0], [0.0]), ([], [])])
    def test_invalid_shapes(self, t1, t2):
        with pytest.raises(ValueError):
            PairedCircSample(t1, t2)

    def test_pairs_and_len(self):
        s = PairedCircSample([0.1, 0.2, 0.3], [1.0, 2.0, 3.0])
        assert len(s) == s.n == 3
        assert s.pairs.shape == (3, 2)


class TestCenterSample:
    def test_constant_margins(self):
        s = PairedCircSample([1.2] * 4, [-2.5] * 4)
        c = center_sample(s)
        assert_allclose(c.theta1, 0.0, atol=1e-12)
        assert_allclose(c.theta2, 0.0, atol=1e-12)

    def test_hand_example(self):
        s = PairedCircSample([PI / 4, 3 * PI / 4], [0.0, 0.0])
        c = center_sample(s)
        assert_allclose(c.theta1, [-PI / 4, PI / 4], atol=1e-12)
        assert_allclose(c.theta2, [0.0, 0.0], atol=1e-12)

    def test_zero_resultant_propagates(self):
        with pytest.raises(UndefinedMeanError):
            center_sample(PairedCircSample([0.0, PI], [0.1, 0.2]))

    @given(paired_samples())
    def test_idempotent(self, s):
        c = center_sample(s)
        cc = center_sample(c)
        assert_allclose(wrap_angle(cc.theta1 - c.theta1), 0.0, atol=1e-10)
        assert_allclose(wrap_angle(cc.theta2 - c.theta2), 0.0, atol=1e-10)
        assert abs(circular_mean(c.theta1)) < 1e-10

    @given(paired_samples(), shifts, shifts)
    def test_rotation_equivariance(self, s, a, b):
        c = center_sample(s)
        cs = center_sample(s.shifted(a, b))
        assert_allclose(wrap_angle(cs.theta1 - c.theta1), 0.0, atol=1e-10)
        assert_allclose(wrap_angle(cs.theta2 - c.theta2), 0.0, atol=1e-10)


class TestTrigMoments:
    def test_all_zero_sample(self):
        m = trig_moments(PairedCircSample(np.zeros(5), np.zeros(5)), [(2, -3)])
        assert m.j1c[2] == 1.0 and m.j1s[2] == 0.0
        assert m.j2c[-3] == 1.0
        assert m.jc[(2, -3)] == 1.0 and m.js[(2, -3)] == 0.0

    def test_zero_frequency(self, rng):
        s = PairedCircSample(rng.uniform(-PI, PI, 7), rng.uniform(-PI, PI, 7))
        m = trig_moments(s, [(0, 0)])
        assert m.jc[(0, 0)] == 1.0 and m.js[(0, 0)] == 0.0

    def test_single_point(self):
        m = trig_moments(PairedCircSample([0.0], [PI / 2]), [(1, 1)])
        assert_allclose(m.jc[(1, 1)], 0.0, atol=1e-15)
        assert_allclose(m.js[(1, 1)], 1.0)

    def test_implied_marginal_pairs(self, rng):
        s = PairedCircSample(rng.uniform(-PI, PI, 9), rng.uniform(-PI, PI, 9))
        m = trig_moments(s, [(2, -1)])
        assert {(2, -1), (2, 0), (0, -1), (0, 0)} <= set(m.jc)
        # the joint moment at (r, 0) is the first marginal moment
        assert_allclose(m.jc[(2, 0)], m.j1c[2], atol=1e-15)
        assert_allclose(m.js[(0, -1)], m.j2s[-1], atol=1e-15)

    @given(paired_samples(min_n=1), st.integers(-3, 3), st.integers(-3, 3))
    def test_bounds_and_symmetries(self, s, r1, r2):
        m = trig_moments(s, [(r1, r2), (-r1, -r2)])
        for table in (m.j1c, m.j1s, m.j2c, m.j2s, m.jc, m.js):
            assert all(-1 - 1e-15 <= v <= 1 + 1e-15 for v in table.values())
        assert_allclose(m.j1c[-r1], m.j1c[r1], atol=1e-14)
        assert_allclose(m.j1s[-r1], -m.j1s[r1], atol=1e-14)
        assert_allclose(m.jc[(-r1, -r2)], m.jc[(r1, r2)], atol=1e-14)
        assert_allclose(m.js[(-r1, -r2)], -m.js[(r1, r2)], atol=1e-14)
        assert m.j1c[0] == 1.0 and m.j2s[0] == 0.0

    def test_phi_accessors(self, rng):
        s = PairedCircSample(rng.uniform(-PI, PI, 6), rng.uniform(-PI, PI, 6))
        m = trig_moments(s, [(1, 2)])
        assert_allclose(m.phi(1, 2), np.mean(np.exp(1j * (s.theta1 + 2 * s.theta2))))
        assert_allclose(m.phi1(1), np.mean(np.exp(1j * s.theta1)))
        assert_allclose(m.phi2(2), np.mean(np.exp(2j * s.theta2)))


class TestLagPairs:
    def test_lag_one(self):
        s = lag_pairs([0.1, 0.2, 0.3], 1)
        assert_array_equal(s.pairs, [[0.1, 0.2], [0.2, 0.3]])

    def test_lag_two(self):
        s = lag_pairs([0.1, 0.2, 0.3], 2)
        assert_array_equal(s.pairs, [[0.1, 0.3]])

    @pytest.mark.parametrize("k", [0, 3, 5, -1, 1.5])
    def test_invalid_lag(self, k):
        with pytest.raises(ValueError):
            lag_pairs([0.1, 0.2, 0.3], k)


class TestAxialToCircular:
    @pytest.mark.parametrize("x, expected", [(PI / 2, -PI), (0.0, 0.0), (3 * PI / 4, -PI / 2)])
    def test_examples(self, x, expected):
        assert_allclose(axial_to_circular(x), expected, atol=1e-15)

    @pytest.mark.parametrize("bad", [-0.1, PI, 4.0])
    def test_out_of_range(self, bad):
        with pytest.raises(ValueError):
            axial_to_circular(bad)
