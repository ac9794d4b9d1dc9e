"""Random machine construction.

Recipe: draw, for every (candidate state, symbol) pair, a uniformly random
destination among the candidates; draw each candidate's emission vector from
a symmetric Dirichlet(alpha); keep the largest recurrent component of the
resulting directed graph and reindex it. Topology and emissions come from
separate Philox streams derived from the config seed, so changing alpha
leaves the topology untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import machine as machine_mod
from ._graph import recurrent_components
from .machine import EpsilonMachine
from .rng import derive_seed, generator


@dataclass(frozen=True)
class SamplerConfig:
    n_candidates: int
    alpha: float = 1.0
    alphabet_size: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.alphabet_size < 2:
            raise ValueError("alphabet_size must be >= 2")


@dataclass(frozen=True, eq=False)
class SampleReport:
    machine: EpsilonMachine
    n_candidates: int
    n_recurrent: int
    transient_fraction: float
    n_recurrent_components_found: int


def sample_epsilon_machine(config: SamplerConfig) -> SampleReport:
    """Draw one machine; deterministic in the config (seed included)."""
    n, a = config.n_candidates, config.alphabet_size

    topo_rng = generator(derive_seed(config.seed, "topology"))
    targets = topo_rng.integers(0, n, size=(n, a), dtype=np.int64)

    em_rng = generator(derive_seed(config.seed, "emission"))
    gamma = em_rng.gamma(config.alpha, 1.0, size=(n, a))
    emission = gamma / gamma.sum(axis=1, keepdims=True)

    adjacency = [targets[s].tolist() for s in range(n)]
    _, recurrent = recurrent_components(adjacency)
    # Largest recurrent class wins; ties go to the one containing the lowest
    # original state index (components hold sorted vertex lists).
    best = max(recurrent, key=lambda comp: (len(comp), -comp[0]))

    keep = np.asarray(best, dtype=np.int64)
    remap = np.full(n, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    sub_emission = emission[keep]
    sub_targets = remap[targets[keep]]
    next_state = np.where(sub_emission > 0.0, sub_targets, -1).astype(np.int32)

    sampled = EpsilonMachine(sub_emission, next_state)
    return SampleReport(
        machine=sampled,
        n_candidates=n,
        n_recurrent=int(keep.size),
        transient_fraction=1.0 - keep.size / n,
        n_recurrent_components_found=len(recurrent),
    )


@dataclass(frozen=True)
class SurveyRow:
    machine_id: int
    seed: int
    n_candidates: int
    n_recurrent: int
    transient_fraction: float
    h_mu_nats: float
    pe_min: float


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    q05: float
    q95: float


@dataclass(frozen=True)
class SurveyResult:
    rows: tuple[SurveyRow, ...]
    stats: dict[str, SummaryStats]

    @staticmethod
    def csv_header() -> str:
        return "machine_id,seed,n_candidates,n_recurrent,transient_fraction,h_mu_nats,pe_min"

    def csv_lines(self) -> list[str]:
        out = [self.csv_header()]
        for r in self.rows:
            out.append(
                f"{r.machine_id},{r.seed},{r.n_candidates},{r.n_recurrent},"
                f"{r.transient_fraction!r},{r.h_mu_nats!r},{r.pe_min!r}"
            )
        return out


def survey_machine(config: SamplerConfig, index: int) -> SurveyRow:
    """Sample and analyze machine ``index`` of a survey. Pure in (config, index)."""
    seed_i = derive_seed(config.seed, "survey", index)
    report = sample_epsilon_machine(replace(config, seed=seed_i))
    summary = machine_mod.analyze(report.machine)
    return SurveyRow(
        machine_id=index,
        seed=seed_i,
        n_candidates=report.n_candidates,
        n_recurrent=report.n_recurrent,
        transient_fraction=report.transient_fraction,
        h_mu_nats=summary.h_mu,
        pe_min=summary.pe_min,
    )


def _stats(values) -> SummaryStats:
    arr = np.asarray(values, dtype=np.float64)
    return SummaryStats(
        mean=float(arr.mean()),
        std=float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
        q05=float(np.quantile(arr, 0.05)),
        q95=float(np.quantile(arr, 0.95)),
    )


def survey(config: SamplerConfig, n_machines: int) -> SurveyResult:
    """Sample ``n_machines`` independent machines and summarize their ground truths."""
    if n_machines < 1:
        raise ValueError("n_machines must be >= 1")
    rows = tuple(survey_machine(config, i) for i in range(n_machines))
    stats = {
        "transient_fraction": _stats([r.transient_fraction for r in rows]),
        "h_mu_nats": _stats([r.h_mu_nats for r in rows]),
        "pe_min": _stats([r.pe_min for r in rows]),
    }
    return SurveyResult(rows, stats)
