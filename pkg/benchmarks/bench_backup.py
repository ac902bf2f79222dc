"""Time one Bellman-backup sweep: compiled kernel against the numpy fallback.

Builds a random game large enough for the per-sweep cost to dominate,
flattens it once, then runs each available backend on identical inputs.

    python benchmarks/bench_backup.py --states 20000 --sweeps 200
"""

import argparse
import random
import time

import numpy as np

from rabingames import StochasticGame
from rabingames.kernels import _backup_py
from rabingames.kernels.compile import compile_game

try:
    from rabingames.kernels import _backup
except ImportError:
    _backup = None


def big_random_game(n_states: int, n_actions: int, branch: int, seed: int) -> StochasticGame:
    rng = random.Random(seed)
    states = [f"g{i}" for i in range(n_states)]
    transitions = []
    for s in states:
        for k in range(rng.randint(1, n_actions)):
            succs = rng.sample(states, rng.randint(1, branch))
            weights = [rng.uniform(0.1, 1.0) for _ in succs]
            total = sum(weights)
            for t, w in zip(succs, weights):
                transitions.append((s, f"a{k}", t, w / total, rng.choice((0, 0, 1, 2, 5))))
    return StochasticGame.build(
        states=states,
        system_states=[s for s in states if rng.random() < 0.5],
        initial=[states[0]],
        gamma=0.95,
        transitions=transitions,
        rabin_pairs=[([], [states[0]])],
    )


def time_backend(sweep, cg, sweeps: int):
    v = np.zeros(cg.n_states)
    out = np.empty_like(v)
    args = (cg.is_system, cg.action_offsets, cg.entry_offsets, cg.succ, cg.prob, cg.rew, cg.gamma)
    for _ in range(3):
        sweep(v, out, *args)
    v[:] = 0.0
    start = time.perf_counter()
    for _ in range(sweeps):
        sweep(v, out, *args)
        v, out = out, v
    return time.perf_counter() - start, v


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", type=int, default=20000)
    ap.add_argument("--actions", type=int, default=3)
    ap.add_argument("--branch", type=int, default=4)
    ap.add_argument("--sweeps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cg = compile_game(big_random_game(args.states, args.actions, args.branch, args.seed))
    print(
        f"game: {cg.n_states} states, {len(cg.entry_offsets) - 1} actions, "
        f"{len(cg.succ)} entries, {args.sweeps} sweeps"
    )

    dt_py, v_py = time_backend(_backup_py.backup_sweep, cg, args.sweeps)
    print(f"numpy fallback : {dt_py / args.sweeps * 1e3:8.3f} ms/sweep ({args.sweeps / dt_py:8.1f} sweeps/s)")
    if _backup is None:
        print("compiled kernel: not built")
        return
    dt_cy, v_cy = time_backend(_backup.backup_sweep, cg, args.sweeps)
    print(f"compiled kernel: {dt_cy / args.sweeps * 1e3:8.3f} ms/sweep ({args.sweeps / dt_cy:8.1f} sweeps/s)")
    print(f"speedup x{dt_py / dt_cy:.2f}, max |difference| {np.max(np.abs(v_py - v_cy)):.2e}")


if __name__ == "__main__":
    main()
