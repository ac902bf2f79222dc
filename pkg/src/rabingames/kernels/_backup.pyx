# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Bellman-backup sweep (same contract as _backup_py.backup_sweep)."""

import numpy as np

cimport numpy as cnp


def backup_sweep(
    cnp.float64_t[::1] v_in,
    cnp.float64_t[::1] v_out,
    cnp.int8_t[::1] is_system,
    cnp.int64_t[::1] action_offsets,
    cnp.int64_t[::1] entry_offsets,
    cnp.int64_t[::1] succ,
    cnp.float64_t[::1] prob,
    cnp.float64_t[::1] rew,
    double gamma,
):
    cdef Py_ssize_t n = v_in.shape[0]
    cdef Py_ssize_t s, j, e
    cdef double q, best, diff, residual = 0.0
    cdef bint first
    for s in range(n):
        best = 0.0
        first = True
        for j in range(action_offsets[s], action_offsets[s + 1]):
            q = 0.0
            for e in range(entry_offsets[j], entry_offsets[j + 1]):
                q += prob[e] * (rew[e] + gamma * v_in[succ[e]])
            if first:
                best = q
                first = False
            elif is_system[s]:
                if q > best:
                    best = q
            else:
                if q < best:
                    best = q
        v_out[s] = best
        diff = best - v_in[s]
        if diff < 0.0:
            diff = -diff
        if diff > residual:
            residual = diff
    return residual
