"""Difference operators, property batteries, and the resampling probe."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grws import (
    HOLDS,
    VIOLATED,
    battery,
    function_alternation_probe,
    is_n_alternating,
    is_n_monotone,
    make_params,
    moments,
    n_contractive,
    nabla,
    nabla_ratio,
    weight_sq,
)

small_fractions = st.fractions(min_value=F(-5), max_value=F(5), max_denominator=40)
positive_fractions = st.fractions(min_value=F(1, 40), max_value=F(5), max_denominator=40)


def seq_from(values, pad=F(0)):
    values = [F(v) for v in values]
    return lambda k: values[k] if k < len(values) else pad


SECTOR_I = make_params(2, F(-1, 2), F(-1, 4))
SECTOR_II = make_params(2, F(-1, 2), F(1, 4))
SECTOR_V = make_params(2, F(1, 2), F(1, 4))
RAY_IV = make_params(2, F(1, 4), F(1, 2))
VIIIA = make_params(F(3, 2), F(-1, 2), F(-2, 3))


def wsq(params):
    return lambda k: weight_sq(params, k)


class TestNabla:
    def test_constants_vanish(self):
        assert nabla(lambda k: F(1), 2, 0) == 0

    def test_first_difference_of_identity(self):
        assert nabla(lambda k: F(k), 1, 5) == -1

    def test_moment_difference_example(self):
        assert nabla(moments(SECTOR_I), 1, 0) == F(1, 3)

    @given(values=st.lists(small_fractions, min_size=12, max_size=12),
           n=st.integers(1, 5), k=st.integers(0, 5))
    @settings(max_examples=60, deadline=None)
    def test_recurrence(self, values, n, k):
        seq = seq_from(values)
        assert nabla(seq, n, k) == nabla(seq, n - 1, k) - nabla(seq, n - 1, k + 1)

    @given(values=st.lists(positive_fractions, min_size=12, max_size=12),
           n=st.integers(0, 4), k=st.integers(0, 5))
    @settings(max_examples=60, deadline=None)
    def test_ratio_recurrence(self, values, n, k):
        # Multiplicative analogue of the additive recurrence.
        seq = seq_from(values, pad=F(1))
        if n == 0:
            assert nabla_ratio(seq, 0, k) == seq(k)
        else:
            assert nabla_ratio(seq, n, k) == nabla_ratio(seq, n - 1, k) / nabla_ratio(seq, n - 1, k + 1)

    def test_ratio_rejects_nonpositive_terms(self):
        with pytest.raises(ValueError):
            nabla_ratio(seq_from([1, -1]), 1, 0)


class TestSingleOrderChecks:
    def test_sector_one_weights_increase(self):
        assert is_n_alternating(wsq(SECTOR_I), 1, 20).status == HOLDS

    def test_constant_sequence_always_passes(self):
        for n in (1, 2, 5):
            assert is_n_alternating(lambda k: F(3), n, 10).status == HOLDS
            assert is_n_monotone(lambda k: F(3), n, 10).status == HOLDS

    def test_sector_five_weights_decrease(self):
        verdict = is_n_alternating(wsq(SECTOR_V), 1, 5)
        assert verdict.status == VIOLATED
        assert (verdict.witness.order, verdict.witness.index) == (1, 0)

    def test_increasing_sequence_not_monotone(self):
        verdict = is_n_monotone(lambda k: F(k), 1, 10)
        assert verdict.status == VIOLATED
        assert verdict.witness.index == 0

    def test_viiia_increment_monotonicity(self):
        g = moments(VIIIA)
        increments = lambda k: g(k + 1) - g(k)
        for n in range(1, 7):
            assert is_n_monotone(increments, n, 20).status == HOLDS


class TestContractivity:
    def test_sector_one_is_contractive(self):
        assert n_contractive(moments(SECTOR_I), 1, 20).status == HOLDS

    def test_constant_moments_pass(self):
        assert n_contractive(lambda k: F(1), 3, 10).status == HOLDS

    def test_expansive_shift_fails_immediately(self):
        verdict = n_contractive(moments(VIIIA), 1, 5)
        assert verdict.status == VIOLATED
        assert verdict.witness.index == 0

    @given(n=st.integers(1, 5))
    @settings(max_examples=10, deadline=None)
    def test_agrees_with_monotonicity_route(self, n):
        for params in (SECTOR_I, SECTOR_II, RAY_IV, VIIIA):
            g = moments(params)
            assert n_contractive(g, n, 12).status == is_n_monotone(g, n, 12).status


class TestBattery:
    def test_sector_one_log_alternating(self):
        verdict = battery(wsq(SECTOR_I), "log-alternating", 10, 20)
        assert verdict.status == HOLDS

    def test_mid_moments_are_log_monotone(self):
        verdict = battery(moments(SECTOR_I), "log-monotone", 10, 20)
        assert verdict.status == HOLDS

    def test_ray_shift_fails_log_alternation_with_witness(self):
        verdict = battery(wsq(RAY_IV), "log-alternating", 10, 20)
        assert verdict.status == VIOLATED
        # First offending cell, frozen from the exact ratio computation.
        assert (verdict.witness.order, verdict.witness.index) == (4, 0)
        assert verdict.witness.value > 0

    def test_diagonal_passes_every_flavor(self):
        diagonal = make_params(2, F(1, 3), F(1, 3))
        for flavor in ("monotone", "alternating", "log-monotone", "log-alternating"):
            assert battery(wsq(diagonal), flavor, 6, 12).status == HOLDS

    def test_verdict_serialization(self):
        verdict = battery(wsq(RAY_IV), "log-alternating", 10, 20)
        payload = verdict.to_json()
        assert payload["status"] == "violated"
        assert payload["witness"]["n"] == 4
        assert payload["depth"] == {"n_max": 10, "k_max": 20}

    def test_unknown_flavor_rejected(self):
        with pytest.raises(ValueError):
            battery(wsq(SECTOR_I), "sideways", 2, 2)

    def test_log_and_plain_differences_are_tied(self):
        # ln w(k) telescopes the moments: diff^n ln w == -diff^(n+1) ln g,
        # multiplicatively Q_w(n, k) * Q_g(n+1, k) == 1.
        g = moments(SECTOR_II)
        w = wsq(SECTOR_II)
        for n in range(0, 6):
            for k in range(0, 8):
                assert nabla_ratio(w, n, k) * nabla_ratio(g, n + 1, k) == 1

    def test_alternating_implies_log_alternating_on_samples(self):
        for params in (SECTOR_I, make_params(3, F(-2, 3), F(-1, 3))):
            plain = battery(wsq(params), "alternating", 8, 16)
            logged = battery(wsq(params), "log-alternating", 8, 16)
            assert plain.status == HOLDS
            assert logged.status == HOLDS


class TestProbe:
    def test_sector_one_plain_probe_unit_spacing(self):
        verdict = function_alternation_probe(SECTOR_I, "plain", [F(1)], 8, 16)
        assert verdict.status == HOLDS

    def test_sector_one_half_spacing_needs_certified_path(self):
        # p = 2 at spacing 1/2 resamples through sqrt(2), which is irrational.
        verdict = function_alternation_probe(SECTOR_I, "plain", [F(1, 2)], 6, 10)
        assert verdict.status == HOLDS

    def test_half_spacing_exact_when_base_is_square(self):
        params = make_params(4, F(-1, 2), F(-1, 4))
        verdict = function_alternation_probe(params, "plain", [F(1, 2)], 8, 16)
        assert verdict.status == HOLDS

    def test_sector_two_log_probe(self):
        verdict = function_alternation_probe(SECTOR_II, "log", [F(1)], 8, 16)
        assert verdict.status == HOLDS

    def test_violation_carries_spacing(self):
        verdict = function_alternation_probe(RAY_IV, "log", [F(1)], 8, 16)
        assert verdict.status == VIOLATED
        assert verdict.witness.spacing == 1

    def test_rejects_bad_spacings(self):
        with pytest.raises(ValueError):
            function_alternation_probe(SECTOR_I, "plain", [F(0)], 4, 4)
        with pytest.raises(ValueError):
            function_alternation_probe(SECTOR_I, "plain", [], 4, 4)
        with pytest.raises(ValueError):
            function_alternation_probe(SECTOR_I, "sideways", [F(1)], 4, 4)
