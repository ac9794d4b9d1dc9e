#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy reference.

Run from the repository root:

    python benchmarks/bench_kernels.py

Covers the three hot paths: per-symbol simulation, word-tree block-entropy
enumeration, and stationary power sweeps on a large sparse chain.
"""

from __future__ import annotations

import time

import numpy as np

from epsbench import _kernels
from epsbench._kernels import reference
from epsbench.generator import _cumulative_rows
from epsbench.machine import stationary_distribution
from epsbench.renewal import SurvivalSpec, build_renewal_machine
from epsbench.rng import uniform_block
from epsbench.sampler import SamplerConfig, sample_epsilon_machine


def timed(fn, *args, repeat=3, **kwargs):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    if not _kernels.COMPILED:
        print("compiled backend not available; run `pip install -e .` with a C compiler")
    rows = []

    machine = sample_epsilon_machine(SamplerConfig(300, 1.0, seed=0)).machine
    cum, fallback = _cumulative_rows(machine)
    uniforms = uniform_block(1, 0, 1_000_000)
    args = (cum, machine.next_state, fallback, 0, uniforms)
    t_pure, _ = timed(reference.simulate_path, *args, repeat=1)
    tag = "simulate_path   1e6 steps, 240 states"
    if _kernels.COMPILED:
        t_fast, _ = timed(_kernels.backend.simulate_path, *args)
        rows.append((tag, t_pure, t_fast))
    else:
        rows.append((tag, t_pure, None))

    big = sample_epsilon_machine(SamplerConfig(3000, 1.0, seed=0)).machine
    pi = stationary_distribution(big)
    args = (big.emission, big.next_state, pi, 14, 1e-300)
    t_pure, ent_p = timed(reference.block_entropies, *args, repeat=1)
    tag = "block_entropies depth 14, 2400 states"
    if _kernels.COMPILED:
        t_fast, ent_c = timed(_kernels.backend.block_entropies, *args)
        assert np.allclose(ent_p, ent_c, atol=1e-11)
        rows.append((tag, t_pure, t_fast))
    else:
        rows.append((tag, t_pure, None))

    chain = build_renewal_machine(SurvivalSpec.power_law(1.0, 10_000))
    pi0 = np.full(chain.n_states, 1.0 / chain.n_states)
    args = (chain.emission, chain.next_state, pi0, 2000, True)
    t_pure, _ = timed(reference.power_sweeps, *args, repeat=1)
    tag = "power_sweeps    2000 sweeps, 10001 states"
    if _kernels.COMPILED:
        t_fast, _ = timed(_kernels.backend.power_sweeps, *args)
        rows.append((tag, t_pure, t_fast))
    else:
        rows.append((tag, t_pure, None))

    print(f"{'kernel':<42}{'pure':>10}{'compiled':>10}{'speedup':>9}")
    for tag, t_pure, t_fast in rows:
        if t_fast is None:
            print(f"{tag:<42}{t_pure:>9.3f}s{'-':>10}{'-':>9}")
        else:
            print(f"{tag:<42}{t_pure:>9.3f}s{t_fast:>9.3f}s{t_pure / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
