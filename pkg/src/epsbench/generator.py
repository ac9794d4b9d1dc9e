"""Sequence simulation and empirical entropy estimation.

Simulation starts from the stationary state distribution, so statistics are
exact from the first symbol. Per-step uniforms come from a counter-based
stream keyed by the series seed and indexed by step, which makes any segment
of a series reproducible on its own (given the entry state) and keeps
parallel generation bit-identical to sequential.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import InsufficientData
from .machine import EpsilonMachine, stationary_distribution
from .rng import derive_seed, uniform_block


@dataclass(frozen=True, eq=False)
class SimulatedSeries:
    symbols: np.ndarray
    states: np.ndarray | None
    seed: int
    machine_id: str = ""

    def __post_init__(self):
        sym = np.ascontiguousarray(np.asarray(self.symbols, dtype=np.int8))
        sym.flags.writeable = False
        object.__setattr__(self, "symbols", sym)
        if self.states is not None:
            st = np.ascontiguousarray(np.asarray(self.states, dtype=np.int32))
            st.flags.writeable = False
            object.__setattr__(self, "states", st)

    def __len__(self) -> int:
        return self.symbols.shape[0]


def _cumulative_rows(machine: EpsilonMachine) -> tuple[np.ndarray, np.ndarray]:
    cum = np.cumsum(machine.emission, axis=1)
    supported = machine.emission > 0.0
    # Highest supported symbol per state: landing spot if rounding pushes a
    # uniform past the last cumulative entry.
    fallback = (machine.alphabet_size - 1 - np.argmax(supported[:, ::-1], axis=1)).astype(np.int32)
    return np.ascontiguousarray(cum), fallback


def simulate(
    machine: EpsilonMachine,
    length: int,
    seed: int,
    machine_id: str = "",
    start_state: int | None = None,
    start_index: int = 0,
    keep_states: bool = True,
) -> SimulatedSeries:
    """Generate ``length`` symbols; deterministic in (machine, length, seed).

    ``start_state``/``start_index`` regenerate a mid-series segment: pass the
    state the full series occupied at position ``start_index`` and the output
    matches that series' suffix exactly.
    """
    if length < 0:
        raise ValueError("length must be nonnegative")
    pi = stationary_distribution(machine)
    if start_state is None:
        u0 = uniform_block(derive_seed(seed, "init"), 0, 1)[0]
        start_state = int(np.searchsorted(np.cumsum(pi), u0, side="right"))
        start_state = min(start_state, machine.n_states - 1)
    if length == 0:
        empty = SimulatedSeries(
            np.empty(0, dtype=np.int8),
            np.empty(0, dtype=np.int32) if keep_states else None,
            seed,
            machine_id,
        )
        return empty
    uniforms = uniform_block(derive_seed(seed, "steps"), start_index, length)
    cum, fallback = _cumulative_rows(machine)
    symbols, states = _kernels.simulate_path(
        cum, machine.next_state, fallback, start_state, uniforms
    )
    return SimulatedSeries(symbols, states if keep_states else None, seed, machine_id)


def _context_codes(symbols: np.ndarray, m: int, alphabet_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer codes of the m-history and the (m+1)-gram at each position."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    x = np.asarray(symbols, dtype=np.int64)
    n = x.shape[0]
    if n <= m:
        raise InsufficientData(f"series of length {n} has no {m + 1}-grams")
    if (m + 1) * np.log2(max(alphabet_size, 2)) > 62:
        raise ValueError("context too long to encode")
    windows = np.lib.stride_tricks.sliding_window_view(x, m + 1)
    powers = alphabet_size ** np.arange(m, -1, -1, dtype=np.int64)
    joint = windows @ powers
    context = joint // alphabet_size
    return context, joint


def empirical_conditional_entropy(series, m: int) -> float:
    """Plug-in estimate of H[next symbol | last m symbols] in nats.

    Equal to the mean surprisal -ln p̂(x_t | context_t) over all positions.
    Raises InsufficientData when observed contexts average fewer than 10
    visits.
    """
    symbols = series.symbols if isinstance(series, SimulatedSeries) else np.asarray(series)
    alphabet_size = int(symbols.max()) + 1 if symbols.size else 2
    alphabet_size = max(alphabet_size, 2)
    context, joint = _context_codes(symbols, m, alphabet_size)
    n = joint.shape[0]
    ctx_counts = np.bincount(context)
    n_contexts = int(np.count_nonzero(ctx_counts))
    if n / n_contexts < 10:
        raise InsufficientData(
            f"{n} samples over {n_contexts} contexts (< 10 per context on average)"
        )
    joint_counts = np.bincount(joint)
    joint_counts = joint_counts[joint_counts > 0]
    ctx_counts = ctx_counts[ctx_counts > 0]
    h_joint = -(joint_counts / n) @ np.log(joint_counts / n)
    h_ctx = -(ctx_counts / n) @ np.log(ctx_counts / n)
    return float(h_joint - h_ctx)


def surprisal_series(series, m: int) -> np.ndarray:
    """Per-position -ln p̂(x_t | context_t) under the plug-in distribution."""
    symbols = series.symbols if isinstance(series, SimulatedSeries) else np.asarray(series)
    alphabet_size = max(int(symbols.max()) + 1 if symbols.size else 2, 2)
    context, joint = _context_codes(symbols, m, alphabet_size)
    joint_counts = np.bincount(joint)
    ctx_counts = np.bincount(context)
    return np.log(ctx_counts[context] / joint_counts[joint])


def empirical_conditional_entropy_se(series, m: int, n_blocks: int = 100) -> float:
    """Batch-means standard error of the plug-in estimate.

    Surprisals at nearby positions are dependent (overlapping windows, chain
    memory); contiguous block means wash that out.
    """
    surp = surprisal_series(series, m)
    usable = (surp.shape[0] // n_blocks) * n_blocks
    if usable == 0:
        raise InsufficientData("series too short for batch-means error bars")
    blocks = surp[:usable].reshape(n_blocks, -1).mean(axis=1)
    return float(blocks.std(ddof=1) / np.sqrt(n_blocks))


# --- series files ------------------------------------------------------------


def write_series(series: SimulatedSeries, path) -> None:
    """One ASCII digit per symbol, no newline; metadata in a JSON sidecar."""
    path = Path(path)
    path.write_text("".join(str(int(s)) for s in series.symbols), encoding="utf-8")
    meta = {"machine_id": series.machine_id, "seed": series.seed, "length": len(series)}
    path.with_suffix(path.suffix + ".meta.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )


def read_series(path) -> SimulatedSeries:
    path = Path(path)
    text = path.read_text(encoding="utf-8").strip()
    symbols = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
    meta_path = path.with_suffix(path.suffix + ".meta.json")
    seed, machine_id = 0, ""
    if meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        seed = int(meta.get("seed", 0))
        machine_id = str(meta.get("machine_id", ""))
    return SimulatedSeries(symbols.astype(np.int8), None, seed, machine_id)
