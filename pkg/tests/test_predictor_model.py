import numpy as np
import pytest

from epsbench.errors import EmptyRange
from epsbench.generator import simulate
from epsbench.infotheory import inverse_binary_entropy, myopic_entropy_rate
from epsbench.machine import analyze
from epsbench.predictors import (
    FAMILIES,
    LogisticReadout,
    NgrcConfig,
    ReservoirConfig,
    TrainedPredictor,
    dump_predictor,
    evaluate_error_rate,
    load_predictor,
    matched_configs,
    train_predictor,
)
from epsbench.sampler import SamplerConfig, sample_epsilon_machine


def test_matched_configs_feature_counts():
    configs = matched_configs(m=10, seed=1)
    counts = {}
    for family, cfg in configs.items():
        if family == "ngrc":
            counts[family] = cfg.m + cfg.m * (cfg.m + 1) // 2
        elif family == "lstm":
            counts[family] = cfg.hidden_size
        elif family == "rc_quadratic":
            counts[family] = cfg.n_nodes + cfg.n_nodes * (cfg.n_nodes + 1) // 2
        else:
            counts[family] = cfg.n_nodes
    assert counts == {"ngrc": 65, "rc_quadratic": 65, "rc_linear": 110, "lstm": 110}


def test_ngrc_reaches_golden_mean_optimum(golden_mean):
    train = simulate(golden_mean, 100_000, seed=1, keep_states=False)
    test = simulate(golden_mean, 20_000, seed=2, keep_states=False)
    tp = train_predictor("ngrc", train.symbols, NgrcConfig(m=1))
    assert tp.feature_count == 2
    pe = evaluate_error_rate(tp, test.symbols, (100, len(test)))
    assert abs(pe - 1 / 3) < 0.01


def test_rc_families_learn_period_two(period_two):
    train = simulate(period_two, 5000, seed=3, keep_states=False)
    test = simulate(period_two, 1000, seed=4, keep_states=False)
    for family in ("rc_linear", "rc_quadratic"):
        tp = train_predictor(family, train.symbols, ReservoirConfig(n_nodes=8, seed=5))
        pe = evaluate_error_rate(tp, test.symbols, (100, 1000))
        assert pe == 0.0, family


def test_evaluate_tie_breaks_toward_zero():
    tp = TrainedPredictor(
        family="ngrc",
        config=NgrcConfig(m=1),
        feature_count=2,
        readout=LogisticReadout(weights=np.zeros(2), bias=0.0, l2_lambda=0.0),
    )
    symbols = np.array([0, 1, 0, 1, 0, 1], dtype=np.int8)
    pe = evaluate_error_rate(tp, symbols, (1, 6))
    # constant p = 0.5 predicts 0 everywhere; errors exactly on the ones
    assert pe == pytest.approx(np.mean(symbols[1:] == 1))


def test_constant_zero_predictor_on_fair_coin(fair_coin):
    series = simulate(fair_coin, 100_000, seed=9, keep_states=False)
    tp = TrainedPredictor(
        family="ngrc",
        config=NgrcConfig(m=1),
        feature_count=2,
        readout=LogisticReadout(weights=np.zeros(2), bias=-10.0, l2_lambda=0.0),
    )
    pe = evaluate_error_rate(tp, series.symbols, (1, len(series)))
    assert abs(pe - 0.5) < 0.005


def test_evaluate_range_checks(golden_mean):
    series = simulate(golden_mean, 2000, seed=5, keep_states=False)
    tp = train_predictor("ngrc", series.symbols, NgrcConfig(m=4))
    with pytest.raises(EmptyRange):
        evaluate_error_rate(tp, series.symbols, (500, 500))
    with pytest.raises(ValueError):
        evaluate_error_rate(tp, series.symbols, (2, 100))  # before first window


def test_evaluation_deterministic(golden_mean):
    series = simulate(golden_mean, 30_000, seed=6, keep_states=False)
    test = simulate(golden_mean, 5_000, seed=7, keep_states=False)
    tp = train_predictor("ngrc", series.symbols, NgrcConfig(m=3))
    a = evaluate_error_rate(tp, test.symbols, (100, 5000))
    b = evaluate_error_rate(tp, test.symbols, (100, 5000))
    assert a == b


def test_linear_ngrc_respects_fano_floor():
    # logistic regression on the raw last-k symbols can never beat the
    # k-history bound by more than evaluation noise
    machine = sample_epsilon_machine(SamplerConfig(120, 1.0, seed=41)).machine
    summary = analyze(machine)
    k = 3
    curve = myopic_entropy_rate(machine, k, pi=summary.pi)
    bound = inverse_binary_entropy(min(float(curve.h_of_m[k]), np.log(2)))
    train = simulate(machine, 150_000, seed=8, keep_states=False)
    test = simulate(machine, 30_000, seed=9, keep_states=False)

    from epsbench.predictors.logistic import train_logistic_readout
    from epsbench.predictors.ngrc import ngrc_feature_matrix

    feats, t0 = ngrc_feature_matrix(train.symbols, k, include_quadratic=False)
    readout = train_logistic_readout(feats[:-1], train.symbols[k:], 1e-4)
    tfeats, _ = ngrc_feature_matrix(test.symbols, k, include_quadratic=False)
    guesses = (readout.predict_proba(tfeats[:-1]) > 0.5).astype(np.int8)
    errors = guesses != test.symbols[k:]
    se = errors.std(ddof=1) / np.sqrt(errors.size)
    assert errors.mean() >= bound - 3 * se


@pytest.mark.parametrize("family", FAMILIES)
def test_dump_load_round_trip(family, golden_mean):
    train = simulate(golden_mean, 4000, seed=10, keep_states=False)
    configs = matched_configs(m=3, seed=2, rc_linear_nodes=6, lstm_hidden=5,
                              lstm_overrides={"max_epochs": 2, "batch_size": 16})
    cfg = configs[family]
    if family == "rc_quadratic":
        cfg = ReservoirConfig(n_nodes=4, seed=cfg.seed)
    tp = train_predictor(family, train.symbols, cfg)
    text = dump_predictor(tp)
    again = load_predictor(text)
    assert again.family == tp.family
    assert again.feature_count == tp.feature_count
    probe = simulate(golden_mean, 300, seed=11, keep_states=False)
    p1 = tp.predict_proba(probe.symbols)
    p2 = again.predict_proba(probe.symbols)
    np.testing.assert_allclose(p1, p2, atol=1e-12, equal_nan=True)
