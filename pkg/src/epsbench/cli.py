"""Command-line interface.

Subcommands: sample, analyze, simulate, renewal, train, experiment.
Exit codes: 0 success, 1 usage error, 2 runtime failure. A --config JSON file
seeds the experiment settings; explicit flags override it.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, generator, harness, infotheory, machine, renewal
from .errors import EpsbenchError
from .predictors import (
    FAMILIES,
    LSTM,
    NGRC,
    LstmConfig,
    NgrcConfig,
    ReservoirConfig,
    dump_predictor,
    evaluate_error_rate,
    train_predictor,
)
from .sampler import SamplerConfig, sample_epsilon_machine


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """argparse that reports usage problems instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> Parser:
    parser = Parser(prog="epsbench", description=__doc__)
    parser.add_argument("--version", action="version", version=f"epsbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a random machine and write its text form")
    p.add_argument("--candidates", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="machine file to write")

    p = sub.add_parser("analyze", help="exact ground truths for a machine file")
    p.add_argument("machine", help="machine file")
    p.add_argument("--m-max", type=int, default=None, help="also write the entropy curve CSV")
    p.add_argument("--out", default=None, help="curve CSV path (with --m-max)")

    p = sub.add_parser("simulate", help="generate a symbol series from a machine file")
    p.add_argument("machine")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="series file to write")

    p = sub.add_parser("renewal", help="build a renewal-process machine / bound curve")
    p.add_argument("--beta", type=float, default=None, help="power-law survival exponent")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--n-max", type=int, default=renewal.DEFAULT_N_MAX)
    p.add_argument("--m-max", type=int, default=None, help="emit the bound curve CSV")
    p.add_argument("--out", default=None, help="curve CSV path")
    p.add_argument("--out-machine", default=None, help="machine file path")

    p = sub.add_parser("train", help="train one predictor family on a series file")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--series", required=True)
    p.add_argument("--m", type=int, default=10, help="shift-register depth (ngrc)")
    p.add_argument("--nodes", type=int, default=110, help="reservoir nodes (rc families)")
    p.add_argument("--hidden", type=int, default=110, help="hidden units (lstm)")
    p.add_argument("--train-frac", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="predictor dump path")

    p = sub.add_parser("experiment", help="run a full figure-style experiment")
    p.add_argument("name", choices=harness.EXPERIMENTS)
    p.add_argument("--config", default=None, help="JSON file with experiment settings")
    p.add_argument("--machines", type=int, default=None)
    p.add_argument("--candidates", default=None, help="comma-separated candidate counts")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--train-len", type=int, default=None)
    p.add_argument("--test-len", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--workers", type=int, default=None)

    return parser


def _cmd_sample(args) -> int:
    report = sample_epsilon_machine(
        SamplerConfig(n_candidates=args.candidates, alpha=args.alpha, seed=args.seed)
    )
    machine.write_machine(report.machine, args.out)
    print(
        f"n_candidates {report.n_candidates}\n"
        f"n_recurrent {report.n_recurrent}\n"
        f"transient_fraction {report.transient_fraction!r}\n"
        f"wrote {args.out}"
    )
    return 0


def _cmd_analyze(args) -> int:
    mach = machine.read_machine(args.machine)
    summary = machine.analyze(mach)
    print(f"n_states {mach.n_states}")
    print(f"alphabet_size {mach.alphabet_size}")
    print(f"h_mu_nats {summary.h_mu!r}")
    print(f"pe_min {summary.pe_min!r}")
    if args.m_max is not None:
        curve = infotheory.myopic_entropy_rate(mach, args.m_max)
        fano = infotheory.fano_curve(curve, summary.pe_min)
        lines = ["m,h_of_m_nats,h_mu_nats,pe_lower_bound,pe_min,pct_increase"]
        for m, bound in enumerate(fano.bounds):
            lines.append(
                f"{m},{float(curve.h_of_m[m])!r},{summary.h_mu!r},"
                f"{bound.pe_lower_bound!r},{summary.pe_min!r},"
                f"{bound.pct_increase_over_pe_min!r}"
            )
        out = args.out or "curve.csv"
        Path(out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {out}")
    return 0


def _cmd_simulate(args) -> int:
    mach = machine.read_machine(args.machine)
    series = generator.simulate(
        mach, args.length, args.seed, machine_id=Path(args.machine).stem, keep_states=False
    )
    generator.write_series(series, args.out)
    print(f"wrote {args.out} ({args.length} symbols)")
    return 0


def _cmd_renewal(args) -> int:
    if args.beta is not None:
        spec = renewal.SurvivalSpec.power_law(args.beta, args.n_max)
    elif args.p is not None and args.q is not None:
        spec = renewal.SurvivalSpec.from_pq(args.p, args.q, args.n_max)
    else:
        raise UsageError("renewal needs --beta or both --p and --q")
    if args.out_machine:
        machine.write_machine(renewal.build_renewal_machine(spec), args.out_machine)
        print(f"wrote {args.out_machine}")
    if args.m_max is not None:
        result = renewal.renewal_fano_curve(spec, args.m_max)
        lines = ["m,h_of_m_nats,h_mu_nats,pe_lower_bound,pe_min,pct_increase,beta,p,q,n_max"]
        for m, bound in enumerate(result.fano.bounds):
            beta = "" if spec.beta is None else repr(spec.beta)
            pp = "" if spec.p is None else repr(spec.p)
            qq = "" if spec.q is None else repr(spec.q)
            lines.append(
                f"{m},{float(result.fano.curve.h_of_m[m])!r},{result.h_mu!r},"
                f"{bound.pe_lower_bound!r},{result.sync_floor!r},"
                f"{bound.pct_increase_over_pe_min!r},{beta},{pp},{qq},{spec.n_max}"
            )
        out = args.out or "renewal_curve.csv"
        Path(out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {out}")
        print(f"machine_pe_min {result.machine_pe_min!r}")
    if not args.out_machine and args.m_max is None:
        raise UsageError("renewal needs --out-machine and/or --m-max")
    return 0


def _cmd_train(args) -> int:
    series = generator.read_series(args.series)
    n = len(series)
    split = max(1, int(args.train_frac * n))
    if args.family == NGRC:
        config = NgrcConfig(m=args.m, seed=args.seed)
    elif args.family == LSTM:
        config = LstmConfig(hidden_size=args.hidden, seed=args.seed)
    else:
        config = ReservoirConfig(n_nodes=args.nodes, seed=args.seed)
    predictor = train_predictor(args.family, series.symbols[:split], config)
    Path(args.out).write_text(dump_predictor(predictor), encoding="utf-8")
    print(f"wrote {args.out}")
    if split < n:
        start = max(predictor.min_time(), predictor.washout)
        if n - split > start:
            pe = evaluate_error_rate(predictor, series.symbols[split:], (start, n - split))
            print(f"holdout_error_rate {pe!r}")
    return 0


def _experiment_config(args) -> harness.ExperimentConfig:
    settings: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise UsageError("--config must hold a JSON object")
        settings.update(loaded)
    settings["experiment"] = args.name
    overrides = {
        "machines": args.machines,
        "alpha": args.alpha,
        "m_max": args.m_max,
        "train_len": args.train_len,
        "test_len": args.test_len,
        "seed": args.seed,
        "out_dir": args.out,
        "workers": args.workers,
    }
    if args.candidates is not None:
        try:
            overrides["candidates"] = tuple(
                int(tok) for tok in str(args.candidates).split(",") if tok.strip()
            )
        except ValueError:
            raise UsageError(f"bad --candidates value {args.candidates!r}") from None
    settings.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return harness.ExperimentConfig(**settings)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad experiment settings: {exc}") from None


def _cmd_experiment(args) -> int:
    config = _experiment_config(args)
    result = harness.run_experiment(config)
    for name, path in sorted(result.files.items()):
        print(f"wrote {path}")
    if result.failures:
        print(f"{len(result.failures)} unit(s) failed; see manifest", file=sys.stderr)
        return 2
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "analyze": _cmd_analyze,
    "simulate": _cmd_simulate,
    "renewal": _cmd_renewal,
    "train": _cmd_train,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (EpsbenchError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
