"""Numpy fallback for the Bellman-backup sweep (same contract as the
compiled kernel in _backup.pyx)."""

from __future__ import annotations

import numpy as np


def backup_sweep(v_in, v_out, is_system, action_offsets, entry_offsets, succ, prob, rew, gamma):
    """One Jacobi sweep: v_out[s] = best_a sum_t p*(r + gamma*v_in[t]).

    `best` is max at system states and min elsewhere.  Returns the sup-norm
    residual between v_out and v_in.
    """
    contrib = prob * (rew + gamma * v_in[succ])
    q = np.add.reduceat(contrib, entry_offsets[:-1])
    highs = np.maximum.reduceat(q, action_offsets[:-1])
    lows = np.minimum.reduceat(q, action_offsets[:-1])
    v_out[:] = np.where(is_system.astype(bool), highs, lows)
    return float(np.max(np.abs(v_out - v_in))) if len(v_in) else 0.0
