"""Experiment runner: reproducible survey/curve/comparison runs with CSV output.

Three experiments, named after the figure-style outputs they produce:

  fig3  myopic-entropy survey over random machines of several sizes
  fig4  error-bound curves for slow-synchronizing renewal-type processes
  fig5  trained-predictor comparison at matched readout width

Every run writes CSVs plus a JSON manifest carrying the fully resolved
configuration, per-run seeds, library versions, and wall time. Units of work
get their seeds by hashing (master seed, experiment tag, unit index), and
aggregation sorts by unit index, so the CSV bytes do not depend on the number
of workers.
"""

from __future__ import annotations

import json
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from . import generator as generator_mod
from . import infotheory, machine as machine_mod, renewal as renewal_mod
from .predictors import model as predictor_mod
from .rng import derive_seed
from .sampler import SamplerConfig, sample_epsilon_machine

WORKERS_ENV = "EPSBENCH_WORKERS"

EXPERIMENTS = ("fig3", "fig4", "fig5")

SURVEY_HEADER = "machine_id,seed,n_candidates,n_recurrent,transient_fraction,h_mu_nats,pe_min"
CURVE_HEADER = "n_candidates,machine_id,m,h_of_m_nats,h_mu_nats,pe_lower_bound,pe_min,pct_increase"
BANDS_HEADER = "n_candidates,m,h_q05,h_q50,h_q95,pct_q05,pct_q50,pct_q95"
RENEWAL_HEADER = (
    "process,beta,p,q,n_max,m,h_of_m_nats,h_mu_nats,pe_lower_bound,pe_min,pct_increase"
)
RESULTS_HEADER = (
    "machine_id,family,feature_count,train_len,test_len,pe,pe_min,pct_increase,fano_bound"
)
AGGREGATE_HEADER = "family,pe_q05,pe_q50,pe_q95,pct_q05,pct_q50,pct_q95"


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "fig3"
    machines: int = 100
    candidates: tuple[int, ...] = (30, 300, 3000)
    alpha: float = 1.0
    m_max: int = 15
    seed: int = 0
    out_dir: str = "."
    workers: int | None = None
    # comparison settings
    train_len: int = 200_000
    test_len: int = 20_000
    washout: int = 100
    l2_lambda: float = 1e-4
    ngrc_m: int = 10
    rc_linear_nodes: int = 110
    lstm_hidden: int = 110
    lstm_window: int = 32
    lstm_learning_rate: float = 1e-3
    lstm_max_epochs: int = 40
    lstm_batch_size: int = 128
    lstm_patience: int = 5
    repetitions: int = 1
    # renewal settings
    renewal_beta: float = 1.0
    renewal_n_max: tuple[int, ...] = (10_000,)
    log_curve_h_mu: float = 0.5
    log_curve_m_max: int = 10_000

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}")
        for name in ("machines", "m_max", "train_len", "test_len", "repetitions"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        object.__setattr__(self, "candidates", tuple(int(c) for c in self.candidates))
        object.__setattr__(self, "renewal_n_max", tuple(int(n) for n in self.renewal_n_max))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    files: dict[str, Path]
    manifest: dict
    failures: list[dict] = field(default_factory=list)


def resolve_workers(config: ExperimentConfig) -> int:
    if config.workers is not None:
        return max(1, config.workers)
    env = os.environ.get(WORKERS_ENV, "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _quantiles(values) -> tuple[float, float, float]:
    arr = np.asarray(values, dtype=np.float64)
    return (
        float(np.quantile(arr, 0.05)),
        float(np.quantile(arr, 0.50)),
        float(np.quantile(arr, 0.95)),
    )


def _run_units(worker, units, n_workers: int):
    """Run worker over units, tolerating per-unit failures.

    Returns (results sorted by unit key, failures). Results are (key, payload)
    pairs; the worker must be a top-level function for pickling.
    """
    results = []
    failures = []
    if n_workers <= 1:
        for unit in units:
            try:
                results.append(worker(unit))
            except Exception as exc:  # per-unit isolation
                failures.append({"unit": repr(unit[1:]), "error": f"{type(exc).__name__}: {exc}"})
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = {pool.submit(worker, unit): unit for unit in units}
            for fut, unit in futures.items():
                try:
                    results.append(fut.result())
                except Exception as exc:
                    failures.append(
                        {"unit": repr(unit[1:]), "error": f"{type(exc).__name__}: {exc}"}
                    )
    results.sort(key=lambda item: item[0])
    return results, failures


def _manifest(config: ExperimentConfig, t0: float, failures, files) -> dict:
    return {
        "experiment": config.experiment,
        "config": asdict(config),
        "resolved_workers": resolve_workers(config),
        "kernel_backend": _kernels.BACKEND_NAME,
        "package_version": __version__,
        "numpy_version": np.__version__,
        "python_version": sys.version.split()[0],
        "platform": platform.platform(),
        "wall_time_s": time.time() - t0,
        "failures": failures,
        "files": {k: str(v) for k, v in files.items()},
    }


def _finish(config, t0, files, failures) -> ExperimentResult:
    manifest = _manifest(config, t0, failures, files)
    out_dir = Path(config.out_dir)
    manifest_path = out_dir / f"{config.experiment}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    files["manifest"] = manifest_path
    return ExperimentResult(config=config, files=files, manifest=manifest, failures=failures)


# --- fig3: myopic survey -----------------------------------------------------


def _survey_unit(args):
    config, size, index = args
    seed = derive_seed(config.seed, "fig3", size, index)
    report = sample_epsilon_machine(
        SamplerConfig(n_candidates=size, alpha=config.alpha, seed=seed)
    )
    summary = machine_mod.analyze(report.machine)
    curve = infotheory.myopic_entropy_rate(report.machine, config.m_max, pi=summary.pi)
    fano = infotheory.fano_curve(curve, summary.pe_min)
    machine_row = (
        index,
        seed,
        size,
        report.n_recurrent,
        report.transient_fraction,
        summary.h_mu,
        summary.pe_min,
    )
    curve_rows = [
        (
            size,
            index,
            m,
            float(curve.h_of_m[m]),
            summary.h_mu,
            fano.bounds[m].pe_lower_bound,
            summary.pe_min,
            fano.bounds[m].pct_increase_over_pe_min,
        )
        for m in range(config.m_max + 1)
    ]
    return (config.candidates.index(size), index), (machine_row, curve_rows)


def run_myopic_survey(config: ExperimentConfig) -> ExperimentResult:
    t0 = time.time()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    units = [
        (config, size, i) for size in config.candidates for i in range(config.machines)
    ]
    results, failures = _run_units(_survey_unit, units, resolve_workers(config))

    machine_rows = [payload[0] for _, payload in results]
    curve_rows = [row for _, payload in results for row in payload[1]]

    bands = []
    for size in config.candidates:
        for m in range(config.m_max + 1):
            hs = [r[3] for r in curve_rows if r[0] == size and r[2] == m]
            pcts = [r[7] for r in curve_rows if r[0] == size and r[2] == m]
            if not hs:
                continue
            bands.append((size, m) + _quantiles(hs) + _quantiles(pcts))

    files = {
        "machines": out_dir / "fig3_machines.csv",
        "curves": out_dir / "fig3_curves.csv",
        "bands": out_dir / "fig3_bands.csv",
    }
    _write_csv(files["machines"], SURVEY_HEADER, machine_rows)
    _write_csv(files["curves"], CURVE_HEADER, curve_rows)
    _write_csv(files["bands"], BANDS_HEADER, bands)
    return _finish(config, t0, files, failures)


# --- fig4: renewal curves ----------------------------------------------------


def run_renewal_curves(config: ExperimentConfig) -> ExperimentResult:
    t0 = time.time()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    failures = []
    reported = {}
    for n_max in config.renewal_n_max:
        try:
            spec = renewal_mod.SurvivalSpec.power_law(config.renewal_beta, n_max)
            result = renewal_mod.renewal_fano_curve(spec, config.m_max)
            reported[str(n_max)] = {
                "h_mu_nats": result.h_mu,
                "machine_pe_min": result.machine_pe_min,
                "sync_floor": result.sync_floor,
            }
            for m, bound in enumerate(result.fano.bounds):
                rows.append(
                    (
                        "power_law",
                        config.renewal_beta,
                        None,
                        None,
                        n_max,
                        m,
                        float(result.fano.curve.h_of_m[m]),
                        result.h_mu,
                        bound.pe_lower_bound,
                        result.sync_floor,
                        bound.pct_increase_over_pe_min,
                    )
                )
        except Exception as exc:
            failures.append(
                {"unit": f"power_law n_max={n_max}", "error": f"{type(exc).__name__}: {exc}"}
            )

    log_curve = infotheory.log_predictive_info_curve(
        config.log_curve_h_mu, config.log_curve_m_max
    )
    pe_min = infotheory.inverse_binary_entropy(config.log_curve_h_mu)
    log_fano = infotheory.fano_curve(log_curve, pe_min)
    for m, bound in enumerate(log_fano.bounds):
        rows.append(
            (
                "log_ipred",
                None,
                None,
                None,
                None,
                m,
                float(log_curve.h_of_m[m]),
                log_curve.h_mu,
                bound.pe_lower_bound,
                pe_min,
                bound.pct_increase_over_pe_min,
            )
        )

    files = {"curves": out_dir / "fig4_curves.csv"}
    _write_csv(files["curves"], RENEWAL_HEADER, rows)
    result = _finish(config, t0, files, failures)
    result.manifest["power_law_ground_truths"] = reported
    manifest_path = result.files["manifest"]
    manifest_path.write_text(
        json.dumps(result.manifest, indent=2, sort_keys=True) + "\n", "utf-8"
    )
    return result


# --- fig5: predictor comparison ----------------------------------------------


def _comparison_unit(args):
    config, index, rep = args
    size = config.candidates[0]
    machine_seed = derive_seed(config.seed, "fig5", size, index)
    report = sample_epsilon_machine(
        SamplerConfig(n_candidates=size, alpha=config.alpha, seed=machine_seed)
    )
    mach = report.machine
    summary = machine_mod.analyze(mach)
    curve = infotheory.myopic_entropy_rate(mach, config.ngrc_m, pi=summary.pi)
    ngrc_bound = infotheory.inverse_binary_entropy(
        min(float(curve.h_of_m[config.ngrc_m]), infotheory.LN2)
    )
    full_bound = infotheory.inverse_binary_entropy(min(summary.h_mu, infotheory.LN2))

    rep_seed = derive_seed(machine_seed, "rep", rep)
    train = generator_mod.simulate(
        mach, config.train_len, derive_seed(rep_seed, "train-series"), keep_states=False
    )
    test = generator_mod.simulate(
        mach, config.test_len, derive_seed(rep_seed, "test-series"), keep_states=False
    )
    configs = predictor_mod.matched_configs(
        m=config.ngrc_m,
        seed=derive_seed(rep_seed, "predictors"),
        rc_linear_nodes=config.rc_linear_nodes,
        lstm_hidden=config.lstm_hidden,
        lstm_overrides={
            "bptt_window": config.lstm_window,
            "learning_rate": config.lstm_learning_rate,
            "max_epochs": config.lstm_max_epochs,
            "batch_size": config.lstm_batch_size,
            "patience": config.lstm_patience,
        },
    )
    machine_id = str(index) if rep == 0 else f"{index}.{rep}"
    eval_range = (config.washout, config.test_len)
    rows = []
    for family in predictor_mod.FAMILIES:
        predictor = predictor_mod.train_predictor(
            family,
            train.symbols,
            configs[family],
            l2_lambda=config.l2_lambda,
            washout=config.washout,
        )
        pe = predictor_mod.evaluate_error_rate(predictor, test.symbols, eval_range)
        pct = (pe - summary.pe_min) / summary.pe_min * 100.0 if summary.pe_min > 0 else float("inf")
        bound = ngrc_bound if family == predictor_mod.NGRC else full_bound
        rows.append(
            (
                machine_id,
                family,
                predictor.feature_count,
                config.train_len,
                config.test_len,
                pe,
                summary.pe_min,
                pct,
                bound,
            )
        )
    machine_row = (
        machine_id,
        machine_seed,
        size,
        report.n_recurrent,
        report.transient_fraction,
        summary.h_mu,
        summary.pe_min,
    )
    return (index, rep), (machine_row, rows)


def run_predictor_comparison(config: ExperimentConfig) -> ExperimentResult:
    t0 = time.time()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    units = [
        (config, i, rep) for i in range(config.machines) for rep in range(config.repetitions)
    ]
    results, failures = _run_units(_comparison_unit, units, resolve_workers(config))

    machine_rows = []
    seen = set()
    result_rows = []
    for (index, rep), (machine_row, rows) in results:
        if index not in seen:
            machine_rows.append(machine_row)
            seen.add(index)
        result_rows.extend(rows)

    aggregate = []
    for family in predictor_mod.FAMILIES:
        pes = [r[5] for r in result_rows if r[1] == family]
        pcts = [r[7] for r in result_rows if r[1] == family]
        if pes:
            aggregate.append((family,) + _quantiles(pes) + _quantiles(pcts))

    files = {
        "machines": out_dir / "fig5_machines.csv",
        "results": out_dir / "fig5_results.csv",
        "aggregate": out_dir / "fig5_aggregate.csv",
    }
    _write_csv(files["machines"], SURVEY_HEADER, machine_rows)
    _write_csv(files["results"], RESULTS_HEADER, result_rows)
    _write_csv(files["aggregate"], AGGREGATE_HEADER, aggregate)
    return _finish(config, t0, files, failures)


RUNNERS = {
    "fig3": run_myopic_survey,
    "fig4": run_renewal_curves,
    "fig5": run_predictor_comparison,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[config.experiment](config)
