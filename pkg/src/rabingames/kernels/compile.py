"""Flatten a game into the array form consumed by the backup kernels.

Layout: state i owns actions action_offsets[i]..action_offsets[i+1]; action
j owns entries entry_offsets[j]..entry_offsets[j+1]; each entry is a
(successor index, probability, reward) triple in parallel arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CompiledGame:
    states: tuple[str, ...]
    state_index: dict[str, int]
    is_system: np.ndarray
    action_offsets: np.ndarray
    entry_offsets: np.ndarray
    succ: np.ndarray
    prob: np.ndarray
    rew: np.ndarray
    gamma: float

    @property
    def n_states(self) -> int:
        return len(self.states)


def compile_game(g) -> CompiledGame:
    states = g.states
    index = {s: i for i, s in enumerate(states)}
    action_offsets = [0]
    entry_offsets = [0]
    succ: list[int] = []
    prob: list[float] = []
    rew: list[float] = []
    for s in states:
        for a in g.actions_of(s):
            for t, p in g.transition[(s, a)].items():
                succ.append(index[t])
                prob.append(float(p))
                rew.append(float(g.reward_of(s, a, t)))
            entry_offsets.append(len(succ))
        action_offsets.append(len(entry_offsets) - 1)
    return CompiledGame(
        states=states,
        state_index=index,
        is_system=np.asarray([s in g.system_states for s in states], dtype=np.int8),
        action_offsets=np.asarray(action_offsets, dtype=np.int64),
        entry_offsets=np.asarray(entry_offsets, dtype=np.int64),
        succ=np.asarray(succ, dtype=np.int64),
        prob=np.asarray(prob, dtype=np.float64),
        rew=np.asarray(rew, dtype=np.float64),
        gamma=float(g.gamma),
    )
