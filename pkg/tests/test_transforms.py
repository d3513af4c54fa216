"""Schur powers, Aluthge transform, subshifts, and the difference
decomposition behind subsampling."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grws import (
    AffineMap,
    affine_subshift_params,
    aluthge,
    battery,
    classify,
    make_params,
    moments,
    pg_coefficients,
    pg_identity_check,
    quotient_shift,
    reciprocal,
    reciprocal_weights,
    schur_power,
    subshift_weights,
    viiia_derived_weights,
    weight_sq,
    weights,
)

SECTOR_I = make_params(2, F(-1, 2), F(-1, 4))
VIIIA = make_params(F(3, 2), F(-1, 2), F(-2, 3))

small_fractions = st.fractions(min_value=F(1, 30), max_value=F(6), max_denominator=30)


class TestSchurPower:
    def test_unit_power_is_identity(self):
        ws = schur_power(weights(SECTOR_I), 1)
        assert ws.weight_sq(0) == F(2, 3)
        assert ws.power == 1

    def test_square_squares(self):
        ws = schur_power(weights(SECTOR_I), 2)
        assert ws.weight_sq(0) == F(4, 9)

    def test_half_power_keeps_log_battery_exact(self):
        ws = schur_power(weights(SECTOR_I), F(1, 2))
        assert ws.power == F(1, 2)
        verdict = battery(ws.base_sq, "log-alternating", 8, 16)
        assert verdict.holds

    def test_rejects_nonpositive_power(self):
        with pytest.raises(ValueError):
            schur_power(weights(SECTOR_I), 0)


class TestAluthge:
    def test_constant_weights_fixed(self):
        ws = aluthge(weights(make_params(2, F(1, 5), F(1, 5))))
        assert ws.base_sq(0) == 1 and ws.power == F(1, 2)

    def test_kernel_is_product_of_neighbours(self):
        ws = aluthge(weights(SECTOR_I))
        assert ws.base_sq(0) == F(2, 3) * F(6, 7)
        assert ws.power == F(1, 2)
        assert abs(float(ws.weight_approx(0, 20)) ** 4 - float(F(2, 3) * F(6, 7))) < 1e-12

    def test_preserves_log_alternation_to_depth(self):
        ws = aluthge(weights(SECTOR_I))
        assert battery(ws.base_sq, "log-alternating", 8, 16).holds

    def test_composes_with_itself(self):
        ws = aluthge(aluthge(weights(SECTOR_I)))
        assert ws.power == F(1, 4)


class TestQuotientAndReciprocal:
    def test_constant_weights_become_one(self):
        ws = quotient_shift(weights(make_params(2, F(1, 5), F(1, 5))))
        assert all(ws.weight_sq(n) == 1 for n in range(5))

    def test_quotient_weights_are_log_monotone(self):
        # diff^n ln(w(k+1)/w(k)) == -diff^(n+1) ln w(k), so log alternation
        # of the original weights makes the quotient weights log monotone.
        ws = quotient_shift(weights(SECTOR_I))
        assert battery(ws.base_sq, "log-monotone", 8, 16).holds

    def test_reciprocal_params_swap_and_involute(self):
        swapped = reciprocal(VIIIA)
        assert (swapped.num_offset, swapped.den_offset) == (F(-2, 3), F(-1, 2))
        assert reciprocal(swapped) == VIIIA
        # Reflection of the hyperexpansive wedge lands inside the lower cone.
        label = classify(swapped)
        assert "I" in label.sectors

    def test_reciprocal_weights_multiply_to_one(self):
        ws = weights(SECTOR_I)
        inverse = reciprocal_weights(ws)
        for n in range(6):
            assert ws.weight_sq(n) * inverse.weight_sq(n) == 1


class TestAffineSubshift:
    def test_parameter_map_example(self):
        mapped = affine_subshift_params(SECTOR_I, AffineMap(2, 1))
        assert mapped == make_params(4, F(-1, 4), F(-1, 8))

    def test_identity_map(self):
        assert affine_subshift_params(SECTOR_I, AffineMap(1, 0)) == SECTOR_I

    def test_subsampled_weights_match_parameter_map(self):
        amap = AffineMap(2, 1)
        mapped = affine_subshift_params(SECTOR_I, amap)
        for n in range(11):
            assert weight_sq(mapped, n) == weight_sq(SECTOR_I, 2 * n + 1)

    def test_subshift_weights_resample_kernel(self):
        ws = subshift_weights(weights(SECTOR_I), AffineMap(3, 2))
        for n in range(8):
            assert ws.weight_sq(n) == weight_sq(SECTOR_I, 3 * n + 2)

    def test_ray_can_escape_the_rays(self):
        # Stride 2 from the k = 1 ray of p = 2: 1/2 == 4**j * (1/4) has no
        # integer solution, so the image is off every ray of the new base
        # (and therefore not subnormal, despite the subnormal original).
        start = make_params(2, F(1, 4), F(1, 2))
        image = affine_subshift_params(start, AffineMap(2, 0))
        assert image == make_params(4, F(1, 4), F(1, 2))
        assert classify(image).special_ray_k is None

    def test_ray_image_can_also_stay_on_a_ray(self):
        # From the k = 2 ray with stride 2 the image lands on the k = 1
        # ray of the new base: 1/2 == 4 * (1/8).
        start = make_params(2, F(1, 8), F(1, 2))
        image = affine_subshift_params(start, AffineMap(2, 0))
        assert classify(image).special_ray_k == 1

    def test_sector_is_preserved(self):
        for params in (SECTOR_I,
                       make_params(2, F(-1, 2), F(1, 4)),
                       make_params(2, F(-1, 4), F(1, 2))):
            base_sectors = classify(params).sectors
            for stride, offset in ((2, 0), (2, 1), (3, 2)):
                image = affine_subshift_params(params, AffineMap(stride, offset))
                assert classify(image).sectors == base_sectors

    def test_mid_closure_on_samples(self):
        for params in (SECTOR_I, make_params(2, F(-1, 2), F(1, 4))):
            assert battery(lambda k: weight_sq(params, k), "log-alternating", 8, 16).holds
            for amap in (AffineMap(2, 0), AffineMap(2, 1), AffineMap(3, 2)):
                image = affine_subshift_params(params, amap)
                verdict = battery(lambda k: weight_sq(image, k), "log-alternating", 8, 16)
                assert verdict.holds

    def test_bad_maps_rejected(self):
        with pytest.raises(ValueError):
            AffineMap(0, 1)
        with pytest.raises(ValueError):
            AffineMap(2, -1)


class TestPGCoefficients:
    def test_stride_two_is_binomial(self):
        assert pg_coefficients(2, 3).coefficients == (1, 3, 3, 1)
        assert pg_coefficients(2, 1).coefficients == (1, 1)

    def test_stride_three_squared(self):
        assert pg_coefficients(3, 2).coefficients == (1, 2, 3, 2, 1)

    @given(stride=st.integers(2, 5), order=st.integers(1, 6))
    @settings(max_examples=40, deadline=None)
    def test_positive_with_total_stride_to_the_order(self, stride, order):
        pg = pg_coefficients(stride, order)
        assert len(pg.coefficients) == order * (stride - 1) + 1
        assert all(c > 0 for c in pg.coefficients)
        assert pg.total() == stride**order

    def test_rejects_degenerate_inputs(self):
        with pytest.raises(ValueError):
            pg_coefficients(1, 2)
        with pytest.raises(ValueError):
            pg_coefficients(2, 0)


class TestPGIdentity:
    def test_motivating_decomposition(self):
        values = [F(i**2 + 1, i + 1) for i in range(20)]
        assert pg_identity_check(lambda k: values[k], 2, 3, 0, 1)

    def test_constant_sequence(self):
        assert pg_identity_check(lambda k: F(7), 3, 2, 1, 0)

    def test_moment_sequence(self):
        g = moments(make_params(2, F(1, 10), F(3, 10)))
        assert pg_identity_check(g, 3, 2, 1, 0)

    @given(values=st.lists(small_fractions, min_size=40, max_size=40),
           stride=st.integers(2, 4), order=st.integers(1, 4),
           m=st.integers(0, 3), start=st.integers(0, 3))
    @settings(max_examples=60, deadline=None)
    def test_random_sequences(self, values, stride, order, m, start):
        seq = lambda k: values[k]  # noqa: E731
        assert pg_identity_check(seq, stride, order, m, start)


class TestWedgeDerivedWeights:
    def test_witness_point_example(self):
        derived, witness = viiia_derived_weights(VIIIA)
        assert (witness.num_offset, witness.den_offset) == (F(-1, 2), F(-4, 9))
        assert "I" in classify(witness).sectors
        for n in range(6):
            assert derived(n) == weight_sq(witness, n) / F(3, 2)

    def test_diagonal_edge(self):
        derived, witness = viiia_derived_weights(make_params(2, F(-1, 3), F(-1, 3)))
        assert (witness.num_offset, witness.den_offset) == (F(-1, 3), F(-1, 6))
        assert "I" in classify(witness).sectors
        assert derived(0) > 0

    def test_increment_ratio_identity(self):
        derived, _ = viiia_derived_weights(VIIIA)
        g = moments(VIIIA)
        for n in range(16):
            dg_n = g(n + 1) - g(n)
            dg_next = g(n + 2) - g(n + 1)
            assert dg_next / dg_n == derived(n)

    def test_rejects_points_off_the_wedge(self):
        with pytest.raises(ValueError):
            viiia_derived_weights(make_params(2, F(-1, 2), F(-1, 4)))
        with pytest.raises(ValueError):
            viiia_derived_weights(make_params(2, F(1, 4), F(1, 2)))
