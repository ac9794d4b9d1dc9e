"""Pure-numpy kernels: the fallback backend.

Semantics here are the contract; the compiled backend in ``_speedups.pyx``
must agree with these functions to floating-point roundoff (exactly, for the
integer-valued outputs of ``simulate_path``).
"""

from __future__ import annotations

import numpy as np


def simulate_path(cum_emission, next_state, fallback_symbol, start_state, uniforms):
    """Walk the labeled chain, consuming one uniform per step.

    ``cum_emission`` holds per-state cumulative emission probabilities,
    ``fallback_symbol`` the largest supported symbol per state (used only if a
    uniform lands beyond the last cumulative entry through rounding).
    Returns (symbols, states) where states[t] is the state *before* emitting
    symbols[t].
    """
    n_steps = uniforms.shape[0]
    n_symbols = cum_emission.shape[1]
    symbols = np.empty(n_steps, dtype=np.int8)
    states = np.empty(n_steps, dtype=np.int32)
    state = int(start_state)
    for t in range(n_steps):
        u = uniforms[t]
        row = cum_emission[state]
        x = int(fallback_symbol[state])
        for sym in range(n_symbols):
            if u < row[sym]:
                x = sym
                break
        symbols[t] = x
        states[t] = state
        state = int(next_state[state, x])
    return symbols, states


def apply_transition(emission, next_state, pi):
    """One step of the state-to-state map: returns pi @ T."""
    n_states, n_symbols = emission.shape
    out = np.zeros(n_states, dtype=np.float64)
    for x in range(n_symbols):
        dest = next_state[:, x]
        ok = dest >= 0
        if ok.all():
            out += np.bincount(dest, weights=pi * emission[:, x], minlength=n_states)
        else:
            out += np.bincount(
                dest[ok], weights=pi[ok] * emission[ok, x], minlength=n_states
            )
    return out


def power_sweeps(emission, next_state, pi, n_sweeps, lazy=True):
    """Run ``n_sweeps`` (optionally half-lazy) power-iteration sweeps."""
    pi = pi.copy()
    for _ in range(n_sweeps):
        nxt = apply_transition(emission, next_state, pi)
        if lazy:
            nxt = 0.5 * (pi + nxt)
        pi = nxt / nxt.sum()
    return pi


def block_entropies(emission, next_state, pi, l_max, prune=1e-300):
    """Shannon entropy of the length-L word distribution for L = 0..l_max.

    Depth-first recursion over the word tree; each node carries the joint
    vector p(word, state), so memory stays O(l_max * n_states). Words whose
    total mass falls to ``prune`` or below contribute nothing and are not
    expanded.
    """
    n_states, n_symbols = emission.shape
    ent = np.zeros(l_max + 1, dtype=np.float64)

    def expand(vec, depth):
        if depth == l_max:
            return
        for x in range(n_symbols):
            weights = vec * emission[:, x]
            dest = next_state[:, x]
            ok = dest >= 0
            if ok.all():
                child = np.bincount(dest, weights=weights, minlength=n_states)
            else:
                child = np.bincount(dest[ok], weights=weights[ok], minlength=n_states)
            total = float(child.sum())
            if total > prune:
                ent[depth + 1] += -total * np.log(total)
                expand(child, depth + 1)

    expand(pi.astype(np.float64, copy=True), 0)
    return ent
