import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsbench.errors import CapExceeded, DomainError, UnsupportedAlphabet
from epsbench.infotheory import (
    LN2,
    binary_entropy,
    block_entropy,
    block_entropy_curve,
    fano_curve,
    fano_report,
    inverse_binary_entropy,
    log_predictive_info_curve,
    myopic_entropy_rate,
    predictive_information,
    word_distribution,
)
from epsbench.machine import EpsilonMachine, stationary_distribution
from epsbench.sampler import SamplerConfig, sample_epsilon_machine

from conftest import brute_force_words


def test_word_distribution_golden_mean(golden_mean):
    words = word_distribution(golden_mean, 2)
    assert words["00"] == pytest.approx(1 / 3, abs=1e-12)
    assert words["01"] == pytest.approx(1 / 3, abs=1e-12)
    assert words["10"] == pytest.approx(1 / 3, abs=1e-12)
    assert words["11"] == 0.0


def test_word_distribution_fair_coin(fair_coin):
    words = word_distribution(fair_coin, 3)
    assert len(words) == 8
    for p in words.values():
        assert p == pytest.approx(1 / 8, abs=1e-12)


def test_word_distribution_period_two(period_two):
    words = word_distribution(period_two, 2)
    assert words["01"] == pytest.approx(0.5) and words["10"] == pytest.approx(0.5)
    assert words["00"] == 0.0 and words["11"] == 0.0


def test_word_distribution_matches_brute_force():
    machine = sample_epsilon_machine(SamplerConfig(40, 1.0, seed=17)).machine
    pi = stationary_distribution(machine)
    mine = word_distribution(machine, 5, pi=pi)
    ref = brute_force_words(machine, pi, 5)
    assert mine.keys() == ref.keys()
    for w in ref:
        assert mine[w] == pytest.approx(ref[w], abs=1e-12)
    assert sum(mine.values()) == pytest.approx(1.0, abs=1e-9)


def test_block_entropy_examples(golden_mean):
    assert block_entropy(golden_mean, 0) == 0.0
    assert block_entropy(golden_mean, 1) == pytest.approx(binary_entropy(1 / 3), abs=1e-12)
    assert block_entropy(golden_mean, 2) == pytest.approx(math.log(3), abs=1e-12)


def test_block_entropy_monotone_concave():
    machine = sample_epsilon_machine(SamplerConfig(60, 1.0, seed=23)).machine
    H = block_entropy_curve(machine, 10)
    diffs = np.diff(H)
    assert np.all(diffs >= -1e-9)
    assert np.all(np.diff(diffs) <= 1e-9)


def test_myopic_curve_golden_mean(golden_mean):
    curve = myopic_entropy_rate(golden_mean, 4)
    assert curve.h_of_m[0] == pytest.approx(0.6365141682948128, abs=1e-12)
    np.testing.assert_allclose(curve.h_of_m[1:], curve.h_mu, atol=1e-12)
    assert curve.h_mu == pytest.approx((2 / 3) * LN2, abs=1e-12)


def test_myopic_curve_fair_coin(fair_coin):
    curve = myopic_entropy_rate(fair_coin, 5)
    np.testing.assert_allclose(curve.h_of_m, LN2, atol=1e-12)


def test_myopic_curve_invariants_on_sampled_machines():
    for seed in (1, 2, 3):
        machine = sample_epsilon_machine(SamplerConfig(200, 1.0, seed=seed)).machine
        curve = myopic_entropy_rate(machine, 12)
        assert np.all(np.diff(curve.h_of_m) <= 1e-9)  # nonincreasing
        assert np.all(curve.h_of_m >= curve.h_mu - 1e-9)
        assert curve.h_of_m[0] <= LN2 + 1e-12


def test_enumeration_caps():
    machine = sample_epsilon_machine(SamplerConfig(10, 1.0, seed=0)).machine
    with pytest.raises(CapExceeded):
        block_entropy(machine, 21)
    with pytest.raises(CapExceeded):
        myopic_entropy_rate(machine, 25)
    ternary = EpsilonMachine.from_transitions(
        1, 3, [(0, 0, 0.2, 0), (0, 1, 0.3, 0), (0, 2, 0.5, 0)]
    )
    assert block_entropy(ternary, 3) == pytest.approx(3 * 1.0296530140645737, abs=1e-9)
    with pytest.raises(UnsupportedAlphabet):
        block_entropy(ternary, 11)


def test_predictive_information_examples(golden_mean, period_two, fair_coin):
    for m in range(4):
        assert predictive_information(myopic_entropy_rate(fair_coin, 4), m) == pytest.approx(
            0.0, abs=1e-12
        )
    curve = myopic_entropy_rate(golden_mean, 6)
    expected = binary_entropy(1 / 3) - (2 / 3) * LN2
    for m in range(1, 6):
        assert predictive_information(curve, m) == pytest.approx(expected, abs=1e-12)
    p2 = myopic_entropy_rate(period_two, 5)
    assert predictive_information(p2, 1) == pytest.approx(LN2, abs=1e-12)
    assert predictive_information(p2, 5) == pytest.approx(LN2, abs=1e-12)


def test_predictive_information_increment_identity():
    machine = sample_epsilon_machine(SamplerConfig(80, 1.0, seed=5)).machine
    curve = myopic_entropy_rate(machine, 8)
    for m in range(7):
        inc = predictive_information(curve, m + 1) - predictive_information(curve, m)
        assert inc == pytest.approx(curve.h_of_m[m + 1] - curve.h_mu, abs=1e-12)
    with pytest.raises(IndexError):
        predictive_information(curve, 9)


def test_binary_entropy_values():
    assert binary_entropy(0.5) == pytest.approx(LN2, abs=1e-15)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.1) == pytest.approx(0.3250829733914482, abs=1e-12)
    with pytest.raises(DomainError):
        binary_entropy(-0.01)
    with pytest.raises(DomainError):
        binary_entropy(1.01)


def test_inverse_binary_entropy_values():
    assert inverse_binary_entropy(0.0) == 0.0
    assert inverse_binary_entropy(LN2) == 0.5
    assert inverse_binary_entropy(0.3250829733914482) == pytest.approx(0.1, abs=1e-9)
    assert inverse_binary_entropy(LN2 + 5e-13) == 0.5  # clamp band
    with pytest.raises(DomainError):
        inverse_binary_entropy(-1e-9)
    with pytest.raises(DomainError):
        inverse_binary_entropy(LN2 + 1e-9)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=LN2, allow_nan=False))
def test_inverse_round_trip_property(h):
    p = inverse_binary_entropy(h)
    assert 0.0 <= p <= 0.5
    assert abs(binary_entropy(p) - h) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-12, max_value=0.5, allow_nan=False))
def test_forward_inverse_round_trip_property(p):
    # Hb is quadratically flat at 1/2, so float64 entropies cannot pin p
    # there better than ~1e-8; the faithful round-trip statement lives in
    # entropy space, with a p-space bound loose enough for the flat region.
    q = inverse_binary_entropy(binary_entropy(p))
    assert 0.0 <= q <= 0.5
    assert abs(binary_entropy(q) - binary_entropy(p)) < 1e-10
    assert q == pytest.approx(p, abs=2e-5)


def test_fano_report_cases():
    rep = fano_report(binary_entropy(0.25), 0.25)
    assert rep.pe_lower_bound == pytest.approx(0.25, abs=1e-9)
    assert rep.pct_increase_over_pe_min == pytest.approx(0.0, abs=1e-5)

    floor = fano_report(0.2, 0.4)  # bound below pe_min: floored to 0
    assert floor.pe_lower_bound < 0.4
    assert floor.pct_increase_over_pe_min == 0.0

    sentinel = fano_report(0.3, 0.0)
    assert math.isinf(sentinel.pct_increase_over_pe_min)
    assert fano_report(0.0, 0.0).pct_increase_over_pe_min == 0.0

    up = fano_report(binary_entropy(0.375), 0.25)
    assert up.pct_increase_over_pe_min == pytest.approx(50.0, abs=1e-6)


def test_fano_consistency_with_optimal_predictor():
    # the optimal predictor itself satisfies the bound: Hb^-1(h_mu) <= pe_min
    from epsbench.machine import analyze

    for seed in range(5):
        machine = sample_epsilon_machine(SamplerConfig(150, 1.0, seed=seed)).machine
        s = analyze(machine)
        assert inverse_binary_entropy(min(s.h_mu, LN2)) <= s.pe_min + 1e-9


def test_fano_curve_composition(golden_mean):
    curve = myopic_entropy_rate(golden_mean, 3)
    fc = fano_curve(curve, 1 / 3)
    assert len(fc.bounds) == 4
    # flat from m=1: bound equals Hb^-1(h_mu) <= pe_min, so pct floors at 0
    assert fc.bounds[1].pct_increase_over_pe_min == 0.0
    assert fc.bounds[0].pe_lower_bound > fc.bounds[1].pe_lower_bound


def test_log_predictive_info_curve_shape():
    curve = log_predictive_info_curve(0.5, 2000)
    assert curve.h_of_m[0] == LN2 and curve.h_of_m[1] == LN2
    assert np.all(np.diff(curve.h_of_m) <= 1e-15)
    assert curve.h_of_m[1000] == pytest.approx(0.5 + 1.0 / 999.0, abs=1e-15)
    assert np.all(curve.h_of_m >= curve.h_mu)
    with pytest.raises(DomainError):
        log_predictive_info_curve(0.8, 10)


def test_enumeration_matches_simulation_small():
    # plug-in estimates agree with exact h(m) within 3 batch-means SEs
    from epsbench.generator import (
        empirical_conditional_entropy,
        empirical_conditional_entropy_se,
        simulate,
    )

    machine = sample_epsilon_machine(SamplerConfig(50, 1.0, seed=31)).machine
    series = simulate(machine, 300_000, seed=8, keep_states=False)
    curve = myopic_entropy_rate(machine, 6)
    for m in (1, 4, 6):
        est = empirical_conditional_entropy(series, m)
        se = empirical_conditional_entropy_se(series, m)
        assert abs(est - float(curve.h_of_m[m])) < 3 * se + 1e-4
