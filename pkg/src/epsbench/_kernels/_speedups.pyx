# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels mirroring ``reference.py``.

Keep the two backends in lockstep: any semantic change must land in both, and
``tests/test_kernels.py`` holds them to agreement.
"""

from libc.math cimport log

import numpy as np

cimport numpy as cnp

cnp.import_array()


def simulate_path(const double[:, ::1] cum_emission, const int[:, ::1] next_state,
                  const int[::1] fallback_symbol, int start_state,
                  const double[::1] uniforms):
    cdef Py_ssize_t n_steps = uniforms.shape[0]
    cdef Py_ssize_t n_symbols = cum_emission.shape[1]
    symbols_arr = np.empty(n_steps, dtype=np.int8)
    states_arr = np.empty(n_steps, dtype=np.int32)
    cdef signed char[::1] symbols = symbols_arr
    cdef int[::1] states = states_arr
    cdef Py_ssize_t t, sym
    cdef int state = start_state
    cdef int x
    cdef double u
    with nogil:
        for t in range(n_steps):
            u = uniforms[t]
            x = fallback_symbol[state]
            for sym in range(n_symbols):
                if u < cum_emission[state, sym]:
                    x = <int>sym
                    break
            symbols[t] = <signed char>x
            states[t] = state
            state = next_state[state, x]
    return symbols_arr, states_arr


def apply_transition(const double[:, ::1] emission, const int[:, ::1] next_state,
                     const double[::1] pi):
    cdef Py_ssize_t n_states = emission.shape[0]
    cdef Py_ssize_t n_symbols = emission.shape[1]
    out_arr = np.zeros(n_states, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t s, x
    cdef int dest
    with nogil:
        for x in range(n_symbols):
            for s in range(n_states):
                dest = next_state[s, x]
                if dest >= 0:
                    out[dest] += pi[s] * emission[s, x]
    return out_arr


def power_sweeps(const double[:, ::1] emission, const int[:, ::1] next_state,
                 const double[::1] pi_in, Py_ssize_t n_sweeps, bint lazy=True):
    cdef Py_ssize_t n_states = emission.shape[0]
    cdef Py_ssize_t n_symbols = emission.shape[1]
    pi_arr = np.array(pi_in, dtype=np.float64, copy=True)
    nxt_arr = np.zeros(n_states, dtype=np.float64)
    cdef double[::1] pi = pi_arr
    cdef double[::1] nxt = nxt_arr
    cdef Py_ssize_t it, s, x
    cdef int dest
    cdef double total
    with nogil:
        for it in range(n_sweeps):
            for s in range(n_states):
                nxt[s] = 0.0
            for x in range(n_symbols):
                for s in range(n_states):
                    dest = next_state[s, x]
                    if dest >= 0:
                        nxt[dest] += pi[s] * emission[s, x]
            if lazy:
                for s in range(n_states):
                    nxt[s] = 0.5 * (pi[s] + nxt[s])
            total = 0.0
            for s in range(n_states):
                total += nxt[s]
            for s in range(n_states):
                pi[s] = nxt[s] / total
    return pi_arr


cdef void _expand(const double[:, ::1] emission, const int[:, ::1] next_state,
                  double[:, ::1] stack, double[::1] ent,
                  Py_ssize_t depth, Py_ssize_t l_max, double prune) noexcept nogil:
    cdef Py_ssize_t n_states = emission.shape[0]
    cdef Py_ssize_t n_symbols = emission.shape[1]
    cdef Py_ssize_t s, x
    cdef int dest
    cdef double total, w
    if depth == l_max:
        return
    for x in range(n_symbols):
        for s in range(n_states):
            stack[depth + 1, s] = 0.0
        total = 0.0
        for s in range(n_states):
            w = stack[depth, s] * emission[s, x]
            dest = next_state[s, x]
            if dest >= 0:
                stack[depth + 1, dest] += w
        for s in range(n_states):
            total += stack[depth + 1, s]
        if total > prune:
            ent[depth + 1] += -total * log(total)
            _expand(emission, next_state, stack, ent, depth + 1, l_max, prune)


def block_entropies(const double[:, ::1] emission, const int[:, ::1] next_state,
                    const double[::1] pi, Py_ssize_t l_max, double prune=1e-300):
    cdef Py_ssize_t n_states = emission.shape[0]
    ent_arr = np.zeros(l_max + 1, dtype=np.float64)
    stack_arr = np.zeros((l_max + 1, n_states), dtype=np.float64)
    stack_arr[0, :] = np.asarray(pi, dtype=np.float64)
    cdef double[::1] ent = ent_arr
    cdef double[:, ::1] stack = stack_arr
    with nogil:
        _expand(emission, next_state, stack, ent, 0, l_max, prune)
    return ent_arr
