"""Monte-Carlo sanity checks for synthesized strategies.

Simulation never proves anything; it exists to eyeball that certified
values and action frequencies look right.  Runs are reproducible: run i of
a batch uses seed + i, and each run consumes its generator in a fixed
order (system action draw, then successor draw, per step).  The truncated
reward of a run differs from the infinite-horizon reward by at most
gamma^horizon * r_max / (1 - gamma).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .game import StochasticGame
from .numeric import Num
from .quantitative import env_best_response_policy
from .strategy import (
    FiniteMemoryStrategy,
    MemorylessStrategy,
    Strategy,
    check_memoryless,
    product_game,
    product_state,
)


@dataclass(frozen=True)
class RunSample:
    seed: int
    trace: tuple[tuple[str, str], ...]
    discounted_reward: float


@dataclass(frozen=True)
class SimulationStats:
    runs: int
    horizon: int
    seed: int
    mean_discounted_reward: float
    visit_counts: Mapping[str, int]
    action_counts: Mapping[str, Mapping[str, int]]
    samples: Optional[tuple[RunSample, ...]] = None

    def to_obj(self) -> dict:
        return {
            "runs": self.runs,
            "horizon": self.horizon,
            "seed": self.seed,
            "mean_discounted_reward": self.mean_discounted_reward,
            "visit_counts": {s: self.visit_counts[s] for s in sorted(self.visit_counts)},
            "action_counts": {
                s: dict(sorted(self.action_counts[s].items()))
                for s in sorted(self.action_counts)
            },
        }


def _draw(rng: random.Random, items: Sequence[tuple[str, Num]]) -> str:
    if len(items) == 1:
        return items[0][0]
    u = rng.random()
    acc = 0.0
    for key, weight in items:
        acc += float(weight)
        if u < acc:
            return key
    return items[-1][0]


def _env_chooser(g: StochasticGame, sigma: Strategy, env):
    """Build env_action(state, memory) for the requested environment policy."""
    if isinstance(env, MemorylessStrategy):
        check_memoryless(g, env, controlled=g.env_states)

        def given(s: str, m: int, rng: random.Random) -> str:
            return _draw(rng, sorted(env.choice[s].items()))

        return given
    if env == "uniform":

        def uniform(s: str, m: int, rng: random.Random) -> str:
            return g.actions_of(s)[rng.randrange(len(g.actions_of(s)))]

        return uniform
    if env == "best_response":
        exact_g = g.to_exact()
        if isinstance(sigma, FiniteMemoryStrategy):
            product, flat = product_game(exact_g, _exact_strategy(sigma))
            policy = env_best_response_policy(product, flat)

            def respond_fm(s: str, m: int, rng: random.Random) -> str:
                return policy[product_state(s, m)]

            return respond_fm
        policy = env_best_response_policy(exact_g, _exact_strategy(sigma))

        def respond(s: str, m: int, rng: random.Random) -> str:
            return policy[s]

        return respond
    raise ValueError(f"unknown environment policy {env!r}")


def _exact_strategy(sigma: Strategy) -> Strategy:
    from fractions import Fraction

    def conv(dist):
        return {a: Fraction(p) if not isinstance(p, Fraction) else p for a, p in dist.items()}

    if isinstance(sigma, MemorylessStrategy):
        return MemorylessStrategy({s: conv(d) for s, d in sigma.choice.items()})
    return FiniteMemoryStrategy(
        sigma.memory_states,
        sigma.initial_memory,
        dict(sigma.update),
        {key: conv(d) for key, d in sigma.choice.items()},
    )


def simulate(
    g: StochasticGame,
    sigma: Strategy,
    *,
    horizon: int,
    runs: int = 1,
    seed: int = 0,
    env="best_response",
    start: Optional[str] = None,
    keep_traces: bool = False,
) -> SimulationStats:
    """Roll out `sigma` against the chosen environment policy.

    env is "best_response" (default, the exact minimizing policy),
    "uniform", or a memoryless environment strategy.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    if runs < 1:
        raise ValueError(f"runs must be at least 1, got {runs}")
    s0 = g.initial[0] if start is None else start
    if s0 not in g.states:
        raise ValueError(f"unknown start state {s0!r}")
    fm = isinstance(sigma, FiniteMemoryStrategy)
    if fm:
        from .strategy import check_finite_memory

        check_finite_memory(g, sigma)
    else:
        check_memoryless(g, sigma)
    env_action = _env_chooser(g, sigma, env)
    gamma = float(g.gamma)
    visit: dict[str, int] = {}
    acts: dict[str, dict[str, int]] = {}
    samples: list[RunSample] = []
    total = 0.0
    for i in range(runs):
        rng = random.Random(seed + i)
        s = s0
        m = sigma.initial_memory if fm else 0
        discount = 1.0
        reward = 0.0
        trace: list[tuple[str, str]] = []
        for _ in range(horizon):
            if s in g.system_states:
                dist = sigma.choice[(s, m)] if fm else sigma.choice[s]
                a = _draw(rng, sorted(dist.items()))
            else:
                a = env_action(s, m, rng)
            t = _draw(rng, sorted(g.transition[(s, a)].items()))
            reward += discount * float(g.reward_of(s, a, t))
            discount *= gamma
            visit[s] = visit.get(s, 0) + 1
            row = acts.setdefault(s, {})
            row[a] = row.get(a, 0) + 1
            if keep_traces:
                trace.append((s, a))
            if fm:
                m = sigma.update[(s, m)]
            s = t
        total += reward
        if keep_traces:
            samples.append(RunSample(seed + i, tuple(trace), reward))
    return SimulationStats(
        runs=runs,
        horizon=horizon,
        seed=seed,
        mean_discounted_reward=total / runs,
        visit_counts=visit,
        action_counts=acts,
        samples=tuple(samples) if keep_traces else None,
    )
