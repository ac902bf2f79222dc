"""Discounted values: optimal value functions, action sets, strategy values.

The optimal value satisfies the Bellman equation with a max over actions at
system states and a min at environment states.  Two engines solve it:

* exact -- strategy improvement over deterministic memoryless system
  strategies, with the environment's best response computed by policy
  iteration and every evaluation done as a rational linear solve.  Both
  improvement loops keep the incumbent action unless a strictly better one
  exists, which rules out cycling.
* iterative -- Jacobi value iteration in float64 starting from the zero
  vector, through the compiled (or numpy) kernel.  It stops once
  residual * gamma / (1 - gamma) <= tol; that quantity also bounds the
  sup-norm distance to the true fixpoint and is reported as error_bound.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .game import StochasticGame
from .kernels import backup_sweep, compile_game
from .numeric import Num, as_fraction, require_exact, solve_linear
from .strategy import (
    EnvMDP,
    FiniteMemoryStrategy,
    MemorylessStrategy,
    Strategy,
    check_memoryless,
    fix_system_strategy,
    product_game,
    product_state,
)


@dataclass(frozen=True)
class ValueFunction:
    """State values plus a bound on their sup-norm distance to the target
    quantity (zero for exact computations)."""

    values: Mapping[str, Num]
    error_bound: Num = 0

    def __getitem__(self, s: str) -> Num:
        return self.values[s]

    def as_floats(self) -> dict[str, float]:
        return {s: float(v) for s, v in self.values.items()}


@dataclass(frozen=True)
class OptimalActionSets:
    """Per state, the actions achieving the Bellman optimum within slack tau."""

    actions: Mapping[str, tuple[str, ...]]
    tau: Num

    def __getitem__(self, s: str) -> tuple[str, ...]:
        return self.actions[s]


def q_value(g: StochasticGame, values, s: str, a: str) -> Num:
    """One-step lookahead value of playing `a` at `s` and continuing with `values`."""
    v = values.values if isinstance(values, ValueFunction) else values
    total: Num = 0
    for t, p in g.transition[(s, a)].items():
        total = total + p * (g.reward_of(s, a, t) + g.gamma * v[t])
    return total


def bellman_backup(g: StochasticGame, values: ValueFunction) -> ValueFunction:
    """One synchronous backup; contraction shrinks the error bound by gamma."""
    out: dict[str, Num] = {}
    for s in g.states:
        qs = [q_value(g, values, s, a) for a in g.actions_of(s)]
        out[s] = max(qs) if s in g.system_states else min(qs)
    return ValueFunction(out, g.gamma * values.error_bound)


def discounted_tail_bound(gamma: Num, horizon: int, r_max: Num) -> Num:
    """Largest total discounted reward obtainable from step `horizon` on."""
    return gamma**horizon * r_max / (1 - gamma)


# ---------------------------------------------------------------------------
# Exact engine: policy iteration over deterministic memoryless strategies
# ---------------------------------------------------------------------------


def _move_q(mdp: EnvMDP, gamma: Num, values: Mapping[str, Num], s: str, label: str) -> Num:
    move = mdp.moves[s][label]
    total = move.reward
    for t, p in move.dist.items():
        total = total + gamma * p * values[t]
    return total


def _evaluate_chain(mdp: EnvMDP, gamma: Num, policy: Mapping[str, str]) -> dict[str, Num]:
    """Value of the Markov chain picked out by `policy` (rational solve of
    V = r + gamma P V)."""
    states = mdp.states
    index = {s: i for i, s in enumerate(states)}
    gamma_f = as_fraction(gamma)
    matrix = []
    rhs = []
    for s in states:
        label = policy.get(s) or next(iter(mdp.moves[s]))
        move = mdp.moves[s][label]
        row = [Fraction(0)] * len(states)
        row[index[s]] += 1
        for t, p in move.dist.items():
            row[index[t]] -= gamma_f * as_fraction(p)
        matrix.append(row)
        rhs.append(as_fraction(move.reward))
    solution = solve_linear(matrix, rhs)
    return {s: solution[index[s]] for s in states}


def _env_best_response(mdp: EnvMDP, gamma: Num) -> tuple[dict[str, Num], dict[str, str]]:
    """Minimizing policy iteration for the environment on a fixed-system MDP."""
    policy = {s: mdp.labels(s)[0] for s in sorted(mdp.controlled)}
    while True:
        values = _evaluate_chain(mdp, gamma, policy)
        changed = False
        for s in sorted(mdp.controlled):
            labels = mdp.labels(s)
            if len(labels) == 1:
                continue
            best_label = policy[s]
            best_q = _move_q(mdp, gamma, values, s, best_label)
            for label in labels:
                q = _move_q(mdp, gamma, values, s, label)
                if q < best_q:
                    best_label, best_q = label, q
            if best_label != policy[s]:
                policy[s] = best_label
                changed = True
        if not changed:
            return values, policy


def _require_exact_game(g: StochasticGame, what: str) -> None:
    nums = [g.gamma]
    nums.extend(p for dist in g.transition.values() for p in dist.values())
    nums.extend(g.reward.values())
    require_exact(nums, what)


def _exact_optimal_values(g: StochasticGame) -> dict[str, Num]:
    _require_exact_game(g, "exact value computation")
    sigma = {s: g.actions_of(s)[0] for s in sorted(g.system_states)}
    while True:
        mdp = fix_system_strategy(g, MemorylessStrategy.deterministic(sigma))
        values, _ = _env_best_response(mdp, g.gamma)
        changed = False
        for s in sorted(g.system_states):
            actions = g.actions_of(s)
            if len(actions) == 1:
                continue
            best_a = sigma[s]
            best_q = q_value(g, values, s, best_a)
            for a in actions:
                q = q_value(g, values, s, a)
                if q > best_q:
                    best_a, best_q = a, q
            if best_a != sigma[s]:
                sigma[s] = best_a
                changed = True
        if not changed:
            return values


# ---------------------------------------------------------------------------
# Iterative engine
# ---------------------------------------------------------------------------


def value_iteration(
    g: StochasticGame,
    tol: float = 1e-9,
    max_sweeps: Optional[int] = None,
) -> tuple[ValueFunction, list[float]]:
    """Float64 value iteration from the zero vector.

    Returns the value function (with its error bound) and the residual of
    every sweep; consecutive residuals decay at least by a factor of gamma
    up to rounding.
    """
    cg = compile_game(g)
    if not (0.0 < cg.gamma < 1.0):
        raise ValueError(f"discount factor must be in (0, 1), got {cg.gamma}")
    shrink = cg.gamma / (1.0 - cg.gamma)
    v = np.zeros(cg.n_states, dtype=np.float64)
    out = np.empty_like(v)
    residuals: list[float] = []
    while True:
        residual = backup_sweep(
            v, out, cg.is_system, cg.action_offsets, cg.entry_offsets,
            cg.succ, cg.prob, cg.rew, cg.gamma,
        )
        residuals.append(residual)
        v, out = out, v
        if residual * shrink <= tol:
            break
        if max_sweeps is not None and len(residuals) >= max_sweeps:
            raise RuntimeError(f"value iteration did not reach tol={tol} in {max_sweeps} sweeps")
    # the contraction bound residual*gamma/(1-gamma) holds in exact
    # arithmetic only; pad it by a few ulps at value scale so it still
    # dominates the true gap after float rounding inside the sweeps
    scale = max(1.0, float(np.max(np.abs(v))))
    pad = 4.0 * sys.float_info.epsilon * scale / (1.0 - cg.gamma)
    error_bound = residuals[-1] * shrink + pad
    values = {s: float(v[cg.state_index[s]]) for s in g.states}
    return ValueFunction(values, error_bound), residuals


def solve_values(g: StochasticGame, mode: str = "exact", tol: float = 1e-9) -> ValueFunction:
    """Optimal discounted values of the game under the chosen engine."""
    if mode == "exact":
        return ValueFunction(_exact_optimal_values(g), 0)
    if mode == "iterative":
        vf, _ = value_iteration(g, tol)
        return vf
    raise ValueError(f"unknown mode {mode!r} (expected 'exact' or 'iterative')")


def optimal_action_sets(
    g: StochasticGame, values: ValueFunction, tau: Optional[Num] = None
) -> OptimalActionSets:
    """Actions achieving the Bellman optimum at each state within slack tau.

    tau defaults to 0 for exact value functions and to 10 * error_bound for
    iterative ones (two backups' worth of slack on either side).
    """
    if tau is None:
        tau = 0 if values.error_bound == 0 else 10 * values.error_bound
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    chosen: dict[str, tuple[str, ...]] = {}
    for s in g.states:
        qs = {a: q_value(g, values, s, a) for a in g.actions_of(s)}
        if s in g.system_states:
            bar = max(qs.values())
            keep = tuple(a for a in g.actions_of(s) if qs[a] >= bar - tau)
        else:
            bar = min(qs.values())
            keep = tuple(a for a in g.actions_of(s) if qs[a] <= bar + tau)
        chosen[s] = keep
    return OptimalActionSets(chosen, tau)


# ---------------------------------------------------------------------------
# Value of a fixed system strategy (environment best response)
# ---------------------------------------------------------------------------


def _iterative_strategy_value(mdp: EnvMDP, gamma: float, tol: float) -> ValueFunction:
    values = {s: 0.0 for s in mdp.states}
    shrink = gamma / (1.0 - gamma)
    while True:
        nxt = {}
        for s in mdp.states:
            qs = [float(_move_q(mdp, gamma, values, s, label)) for label in mdp.labels(s)]
            nxt[s] = min(qs) if s in mdp.controlled else qs[0]
        residual = max(abs(nxt[s] - values[s]) for s in mdp.states)
        values = nxt
        if residual * shrink <= tol:
            scale = max(1.0, max(abs(v) for v in values.values()))
            pad = 4.0 * sys.float_info.epsilon * scale / (1.0 - gamma)
            return ValueFunction(values, residual * shrink + pad)


def strategy_value(
    g: StochasticGame,
    sigma: Strategy,
    mode: str = "exact",
    tol: float = 1e-9,
) -> ValueFunction:
    """Worst-case discounted value of playing `sigma`, per state.

    The environment best-responds.  Finite-memory strategies are evaluated
    on their memory product and reported at the initial memory.
    """
    if isinstance(sigma, FiniteMemoryStrategy):
        product, flat = product_game(g, sigma)
        inner = strategy_value(product, flat, mode, tol)
        return ValueFunction(
            {s: inner.values[product_state(s, sigma.initial_memory)] for s in g.states},
            inner.error_bound,
        )
    check_memoryless(g, sigma)
    if mode == "exact":
        _require_exact_game(g, "exact strategy evaluation")
        require_exact(
            (p for dist in sigma.choice.values() for p in dist.values()),
            "exact strategy evaluation",
        )
        mdp = fix_system_strategy(g, sigma)
        values, _ = _env_best_response(mdp, g.gamma)
        return ValueFunction(values, 0)
    if mode == "iterative":
        mdp = fix_system_strategy(g.to_float(), sigma)
        return _iterative_strategy_value(mdp, float(g.gamma), tol)
    raise ValueError(f"unknown mode {mode!r} (expected 'exact' or 'iterative')")


def env_best_response_policy(g: StochasticGame, sigma: MemorylessStrategy) -> dict[str, str]:
    """Deterministic environment policy minimizing the discounted value
    against `sigma` (exact games only)."""
    _require_exact_game(g, "environment best response")
    mdp = fix_system_strategy(g, sigma)
    _, policy = _env_best_response(mdp, g.gamma)
    return policy
