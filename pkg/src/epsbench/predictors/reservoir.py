"""Fixed random reservoirs with a linear and a tanh block.

The state splits into a tanh-updated block and a linearly-updated block, each
with its own recurrent matrix rescaled to the configured spectral radius
(0.99 by default, just inside the fading-memory edge) and its own input
vector. Only the readout is ever trained.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import derive_seed, generator

DEFAULT_WASHOUT = 100


@dataclass(frozen=True)
class ReservoirConfig:
    n_nodes: int
    nonlinear_fraction: float = 0.5
    spectral_radius: float = 0.99
    input_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be >= 1")
        if not 0.0 <= self.nonlinear_fraction <= 1.0:
            raise ValueError("nonlinear_fraction must lie in [0, 1]")
        if not self.spectral_radius > 0:
            raise ValueError("spectral_radius must be positive")
        if not self.input_scale > 0:
            raise ValueError("input_scale must be positive")


@dataclass(frozen=True, eq=False)
class ReservoirParams:
    config: ReservoirConfig
    w_nonlinear: np.ndarray
    w_linear: np.ndarray
    v_nonlinear: np.ndarray
    v_linear: np.ndarray

    @property
    def n_nonlinear(self) -> int:
        return self.w_nonlinear.shape[0]

    @property
    def n_linear(self) -> int:
        return self.w_linear.shape[0]


def _scaled_block(rng: np.random.Generator, size: int, radius: float) -> np.ndarray:
    if size == 0:
        return np.zeros((0, 0))
    w = rng.standard_normal((size, size)) / np.sqrt(size)
    rho = float(np.max(np.abs(np.linalg.eigvals(w)))) if size > 1 else float(abs(w[0, 0]))
    if rho < 1e-300:
        raise RuntimeError("degenerate recurrent draw (zero spectral radius)")
    return w * (radius / rho)


def init_reservoir(config: ReservoirConfig) -> ReservoirParams:
    """Draw and rescale the fixed weights; deterministic given config.seed."""
    n_nl = int(round(config.nonlinear_fraction * config.n_nodes))
    n_l = config.n_nodes - n_nl
    rng = generator(derive_seed(config.seed, "reservoir"))
    w_nl = _scaled_block(rng, n_nl, config.spectral_radius)
    w_l = _scaled_block(rng, n_l, config.spectral_radius)
    v_nl = rng.uniform(-config.input_scale, config.input_scale, size=n_nl)
    v_l = rng.uniform(-config.input_scale, config.input_scale, size=n_l)
    return ReservoirParams(config, w_nl, w_l, v_nl, v_l)


def run_reservoir(params: ReservoirParams, symbols, washout: int = DEFAULT_WASHOUT):
    """Drive the reservoir with a symbol series.

    Returns (states, washout) where states has shape (len(symbols)+1, n):
    states[t] is the state after consuming symbols[:t], so states[0] is the
    zero start. Rows before ``washout`` carry start-up transients and are
    excluded from readout training.
    """
    x = np.asarray(symbols, dtype=np.float64)
    n_steps = x.shape[0]
    n_nl, n_l = params.n_nonlinear, params.n_linear
    states = np.zeros((n_steps + 1, n_nl + n_l))
    s_nl = np.zeros(n_nl)
    s_l = np.zeros(n_l)
    for t in range(n_steps):
        s_nl = np.tanh(params.w_nonlinear @ s_nl + params.v_nonlinear * x[t])
        s_l = params.w_linear @ s_l + params.v_linear * x[t]
        states[t + 1, :n_nl] = s_nl
        states[t + 1, n_nl:] = s_l
    return states, min(washout, n_steps)


def spectral_radius_of(block: np.ndarray) -> float:
    if block.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(block))))
