import json

import pytest

from epsbench.harness import (
    AGGREGATE_HEADER,
    BANDS_HEADER,
    CURVE_HEADER,
    RENEWAL_HEADER,
    RESULTS_HEADER,
    SURVEY_HEADER,
    ExperimentConfig,
    run_experiment,
    run_myopic_survey,
    run_predictor_comparison,
    run_renewal_curves,
)

TINY_FIG3 = dict(
    experiment="fig3", machines=3, candidates=(12, 25), m_max=4, seed=5
)
TINY_FIG5 = dict(
    experiment="fig5",
    machines=2,
    candidates=(25,),
    seed=5,
    train_len=2500,
    test_len=800,
    washout=50,
    ngrc_m=3,
    rc_linear_nodes=6,
    lstm_hidden=4,
    lstm_max_epochs=2,
    lstm_batch_size=16,
)


def _read(path):
    return path.read_text(encoding="utf-8")


def test_fig3_outputs_and_determinism(tmp_path):
    cfg_a = ExperimentConfig(out_dir=str(tmp_path / "a"), workers=1, **TINY_FIG3)
    cfg_b = ExperimentConfig(out_dir=str(tmp_path / "b"), workers=2, **TINY_FIG3)
    res_a = run_myopic_survey(cfg_a)
    res_b = run_myopic_survey(cfg_b)
    assert not res_a.failures and not res_b.failures

    curves_a = _read(res_a.files["curves"])
    assert curves_a.splitlines()[0] == CURVE_HEADER
    assert _read(res_a.files["machines"]).splitlines()[0] == SURVEY_HEADER
    assert _read(res_a.files["bands"]).splitlines()[0] == BANDS_HEADER
    # worker count must not change a byte
    for name in ("curves", "machines", "bands"):
        assert _read(res_a.files[name]) == _read(res_b.files[name])
    # rerun reproduces bytes
    res_c = run_myopic_survey(ExperimentConfig(out_dir=str(tmp_path / "c"), workers=1, **TINY_FIG3))
    for name in ("curves", "machines", "bands"):
        assert _read(res_a.files[name]) == _read(res_c.files[name])

    rows = curves_a.splitlines()[1:]
    assert len(rows) == 2 * 3 * 5  # sizes * machines * (m_max + 1)


def test_fig3_bands_bracket_median(tmp_path):
    cfg = ExperimentConfig(out_dir=str(tmp_path), workers=1, **TINY_FIG3)
    res = run_myopic_survey(cfg)
    for line in _read(res.files["bands"]).splitlines()[1:]:
        cells = line.split(",")
        h05, h50, h95 = map(float, cells[2:5])
        p05, p50, p95 = map(float, cells[5:8])
        assert h05 <= h50 <= h95
        assert p05 <= p50 <= p95


def test_fig3_manifest_complete(tmp_path):
    cfg = ExperimentConfig(out_dir=str(tmp_path), workers=1, **TINY_FIG3)
    res = run_myopic_survey(cfg)
    manifest = json.loads(_read(res.files["manifest"]))
    assert manifest["experiment"] == "fig3"
    for key in ("machines", "candidates", "alpha", "m_max", "seed", "train_len", "washout"):
        assert key in manifest["config"]
    assert manifest["failures"] == []
    assert manifest["kernel_backend"] in ("compiled", "pure")
    assert manifest["wall_time_s"] >= 0


def test_fig3_partial_failure_manifest(tmp_path):
    # m_max beyond the enumeration cap fails every unit but still flushes files
    cfg = ExperimentConfig(
        experiment="fig3", machines=2, candidates=(10,), m_max=30, seed=1,
        out_dir=str(tmp_path), workers=1,
    )
    res = run_myopic_survey(cfg)
    assert len(res.failures) == 2
    assert res.files["curves"].exists()
    assert _read(res.files["curves"]).splitlines() == [CURVE_HEADER]
    manifest = json.loads(_read(res.files["manifest"]))
    assert len(manifest["failures"]) == 2
    assert "CapExceeded" in manifest["failures"][0]["error"]


def test_fig4_outputs(tmp_path):
    cfg = ExperimentConfig(
        experiment="fig4", machines=1, m_max=6, seed=2, out_dir=str(tmp_path),
        renewal_beta=1.0, renewal_n_max=(50, 200), log_curve_m_max=40,
    )
    res = run_renewal_curves(cfg)
    assert not res.failures
    lines = _read(res.files["curves"]).splitlines()
    assert lines[0] == RENEWAL_HEADER
    power = [l for l in lines[1:] if l.startswith("power_law")]
    logp = [l for l in lines[1:] if l.startswith("log_ipred")]
    assert len(power) == 2 * 7 and len(logp) == 41
    n_maxes = {l.split(",")[4] for l in power}
    assert n_maxes == {"50", "200"}
    manifest = json.loads(_read(res.files["manifest"]))
    assert set(manifest["power_law_ground_truths"]) == {"50", "200"}
    for entry in manifest["power_law_ground_truths"].values():
        assert 0 < entry["machine_pe_min"] < 0.5

    again = run_renewal_curves(
        ExperimentConfig(
            experiment="fig4", machines=1, m_max=6, seed=2, out_dir=str(tmp_path / "again"),
            renewal_beta=1.0, renewal_n_max=(50, 200), log_curve_m_max=40,
        )
    )
    assert _read(res.files["curves"]) == _read(again.files["curves"])


def test_fig4_log_curve_monotone(tmp_path):
    cfg = ExperimentConfig(
        experiment="fig4", machines=1, m_max=4, seed=3, out_dir=str(tmp_path),
        renewal_n_max=(30,), log_curve_m_max=2000,
    )
    res = run_renewal_curves(cfg)
    rows = [l.split(",") for l in _read(res.files["curves"]).splitlines()[1:]]
    pct = {int(r[5]): float(r[10]) for r in rows if r[0] == "log_ipred"}
    assert pct[10] > pct[100] > pct[1000]
    values = [pct[m] for m in sorted(pct)]
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_fig5_outputs_and_worker_independence(tmp_path):
    cfg_a = ExperimentConfig(out_dir=str(tmp_path / "a"), workers=1, **TINY_FIG5)
    cfg_b = ExperimentConfig(out_dir=str(tmp_path / "b"), workers=2, **TINY_FIG5)
    res_a = run_predictor_comparison(cfg_a)
    res_b = run_predictor_comparison(cfg_b)
    assert not res_a.failures and not res_b.failures
    results_a = _read(res_a.files["results"])
    assert results_a.splitlines()[0] == RESULTS_HEADER
    assert _read(res_a.files["aggregate"]).splitlines()[0] == AGGREGATE_HEADER
    for name in ("results", "aggregate", "machines"):
        assert _read(res_a.files[name]) == _read(res_b.files[name])
    rows = [l.split(",") for l in results_a.splitlines()[1:]]
    assert len(rows) == 2 * 4
    assert {r[1] for r in rows} == {"ngrc", "rc_quadratic", "rc_linear", "lstm"}
    by_family = {r[1]: r for r in rows}
    assert by_family["ngrc"][2] == "9" and by_family["rc_linear"][2] == "6"
    for r in rows:
        assert float(r[5]) >= 0 and float(r[6]) > 0
        assert r[3] == "2500" and r[4] == "800"


def test_run_experiment_dispatch(tmp_path):
    cfg = ExperimentConfig(
        experiment="fig4", out_dir=str(tmp_path), renewal_n_max=(20,), m_max=3,
        log_curve_m_max=10,
    )
    res = run_experiment(cfg)
    assert res.files["curves"].name == "fig4_curves.csv"


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="fig9")
    with pytest.raises(ValueError):
        ExperimentConfig(machines=0)


def test_workers_env_fallback(monkeypatch):
    from epsbench.harness import resolve_workers

    cfg = ExperimentConfig(experiment="fig3")
    monkeypatch.setenv("EPSBENCH_WORKERS", "3")
    assert resolve_workers(cfg) == 3
    monkeypatch.setenv("EPSBENCH_WORKERS", "junk")
    assert resolve_workers(cfg) == 1
    monkeypatch.delenv("EPSBENCH_WORKERS")
    assert resolve_workers(cfg) == 1
    assert resolve_workers(ExperimentConfig(experiment="fig3", workers=5)) == 5
