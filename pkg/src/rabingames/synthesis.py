"""Synthesis of almost-sure winning strategies that also optimize reward.

Pipeline shared by both solvers: compute the almost-sure winning region,
restrict the game to it (values and optimal actions are then taken in the
restricted game), and work qualitatively from there.

* solve_optimal keeps only Bellman-optimal system actions and asks whether
  almost-sure winning survives; if it does, one memoryless strategy is both
  optimal and almost-sure winning.
* solve_epsilon trades optimality for winning.  A "split" construction
  forces every system state to flip a biased coin: with probability p the
  system may play any action, with 1-p only optimal ones.  A memoryless
  almost-sure strategy of the split game projects to one of the original
  game that plays suboptimally with probability at most p per step, which
  costs at most epsilon in value when p is the suboptimality budget.  When
  the split game is not almost-surely winnable from the start states, a
  finite-memory strategy plays optimally for a bounded number of its own
  turns and then switches to a safe strategy forever; the bound makes the
  discounted loss of the switch smaller than epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .errors import PreconditionViolatedError
from .game import StochasticGame, induced_subgame, reachable_states
from .numeric import Num
from .qualitative import ASVerdict, almost_sure_region, verify_almost_sure
from .quantitative import (
    OptimalActionSets,
    ValueFunction,
    optimal_action_sets,
    solve_values,
    strategy_value,
)
from .strategy import FiniteMemoryStrategy, MemorylessStrategy, Strategy

KIND_OPTIMAL = "optimal_memoryless"
KIND_EPSILON_MEMORYLESS = "epsilon_memoryless"
KIND_EPSILON_FINITE = "epsilon_finite_memory"
KIND_NONE = "none"


@dataclass(frozen=True)
class SynthesisResult:
    """Outcome of a synthesis run.

    `values` is the certified worst-case value of `strategy` and
    `optimal_values` the optimal value, both on the game restricted to the
    almost-sure region (for finite-memory strategies, values are taken at
    the initial memory).
    """

    kind: str
    strategy: Optional[Strategy]
    values: Optional[ValueFunction]
    optimal_values: Optional[ValueFunction]
    as_verdict: Optional[ASVerdict]
    epsilon: Optional[Num] = None
    split_prob: Optional[Num] = None
    switch_count: Optional[int] = None


def restrict_to_optimal(g: StochasticGame, astar: OptimalActionSets) -> StochasticGame:
    """Keep only optimal system actions, then the part reachable from the
    initial states.  Environment actions are never dropped; the reachable
    set is forward-closed under the kept actions, so the result is a game."""
    filt = {s: astar[s] for s in g.system_states}
    keep = reachable_states(g, g.initial, filt)
    states = tuple(sorted(keep))
    available = {
        s: tuple(astar[s]) if s in g.system_states else g.actions_of(s)
        for s in states
    }
    transition = {
        (s, a): dict(g.transition[(s, a)]) for s in states for a in available[s]
    }
    reward = {
        (s, a, t): r for (s, a, t), r in g.reward.items() if (s, a) in transition
    }
    return StochasticGame(
        states=states,
        system_states=g.system_states & keep,
        initial=tuple(s for s in g.initial if s in keep),
        actions=tuple(sorted({a for (_, a) in transition})),
        available=available,
        transition=transition,
        reward=reward,
        rabin_pairs=tuple(type(p)(p.E & keep, p.F & keep) for p in g.rabin_pairs),
        gamma=g.gamma,
    )


# ---------------------------------------------------------------------------
# Split-state construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitGame:
    """Game in which each system state first flips a (p, 1-p) coin between a
    free copy (all original actions) and an optimal-only copy."""

    game: StochasticGame
    free_of: Mapping[str, str]
    opt_of: Mapping[str, str]
    split_prob: Num
    split_action: str


def _fresh(name: str, taken: set[str]) -> str:
    while name in taken:
        name += "'"
    return name


def build_split_game(g: StochasticGame, astar: OptimalActionSets, p: Num) -> SplitGame:
    """Interpose the coin flip at every system state.

    The coin step carries reward 0; the copies inherit the original
    transitions and rewards.  Rabin pairs are unchanged, so the copies lie
    in no acceptance set and almost-sure winning depends only on the
    original states visited.  With p = 1 the optimal-only copies become
    unreachable and the split game behaves qualitatively like the original.
    """
    if not (0 < p <= 1):
        raise ValueError(f"split probability must lie in (0, 1], got {p}")
    taken = set(g.states)
    free_of: dict[str, str] = {}
    opt_of: dict[str, str] = {}
    for s in sorted(g.system_states):
        free_of[s] = _fresh(f"{s}#free", taken)
        taken.add(free_of[s])
        opt_of[s] = _fresh(f"{s}#opt", taken)
        taken.add(opt_of[s])
    split_action = _fresh("#split", set(g.actions))

    available: dict[str, tuple[str, ...]] = {}
    transition: dict[tuple[str, str], dict[str, Num]] = {}
    reward: dict[tuple[str, str, str], Num] = {}
    for s in g.states:
        if s in g.system_states:
            available[s] = (split_action,)
            coin: dict[str, Num] = {free_of[s]: p}
            if p != 1:
                coin[opt_of[s]] = 1 - p
            transition[(s, split_action)] = dict(sorted(coin.items()))
            for copy, acts in ((free_of[s], g.actions_of(s)), (opt_of[s], astar[s])):
                available[copy] = tuple(acts)
                for a in acts:
                    transition[(copy, a)] = dict(g.transition[(s, a)])
                    for t, r in (
                        (t, g.reward_of(s, a, t)) for t in g.transition[(s, a)]
                    ):
                        if r != 0:
                            reward[(copy, a, t)] = r
        else:
            available[s] = g.actions_of(s)
            for a in g.actions_of(s):
                transition[(s, a)] = dict(g.transition[(s, a)])
                for t in g.transition[(s, a)]:
                    r = g.reward_of(s, a, t)
                    if r != 0:
                        reward[(s, a, t)] = r
    states = tuple(sorted(set(g.states) | set(free_of.values()) | set(opt_of.values())))
    split = StochasticGame(
        states=states,
        system_states=g.system_states | set(free_of.values()) | set(opt_of.values()),
        initial=g.initial,
        actions=tuple(sorted(set(g.actions) | {split_action})),
        available={s: available[s] for s in states},
        transition=transition,
        reward=reward,
        rabin_pairs=g.rabin_pairs,
        gamma=g.gamma,
    )
    return SplitGame(split, free_of, opt_of, p, split_action)


def project_split_strategy(split: SplitGame, sigma_hat: MemorylessStrategy) -> MemorylessStrategy:
    """Collapse a strategy of the split game back onto the original states:
    each action receives p times its weight in the free copy plus (1 - p)
    times its weight in the optimal copy.  Total suboptimal mass is thus at
    most p at every state."""
    p = split.split_prob
    choice: dict[str, dict[str, Num]] = {}
    for s in sorted(split.free_of):
        free, opt = split.free_of[s], split.opt_of[s]
        opt_actions = set(split.game.actions_of(opt))
        dist: dict[str, Num] = {}
        for a in split.game.actions_of(free):
            mass: Num = p * sigma_hat.choice[free].get(a, 0)
            if a in opt_actions and p != 1:
                mass = mass + (1 - p) * sigma_hat.choice[opt].get(a, 0)
            if mass != 0:
                dist[a] = mass
        choice[s] = dist
    return MemorylessStrategy(choice)


# ---------------------------------------------------------------------------
# Budgets and finite-memory switching
# ---------------------------------------------------------------------------


def suboptimality_budget(epsilon: Num, gamma: Num, r_max: Num) -> Num:
    """Largest per-step probability of suboptimal play that still keeps the
    worst-case value within epsilon of optimal.

    Degenerate cases return 1: with no reward at all, or with epsilon so
    large that the formula's denominator vanishes, any strategy qualifies.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not (0 < gamma < 1):
        raise ValueError(f"gamma must lie strictly between 0 and 1, got {gamma}")
    if r_max == 0:
        return 1
    denom = r_max - epsilon * (1 - gamma) * gamma
    if denom <= 0:
        return 1
    p = (1 - gamma) ** 2 * epsilon / denom
    return min(1, p)


def memory_bound(epsilon: Num, gamma: Num, r_max: Num) -> int:
    """Least number of optimal turns after which switching away can no longer
    cost epsilon: the smallest C with gamma^C * r_max / (1 - gamma) < epsilon
    (0 when even an immediate switch is that cheap)."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not (0 < gamma < 1):
        raise ValueError(f"gamma must lie strictly between 0 and 1, got {gamma}")
    if epsilon * (1 - gamma) >= r_max:
        return 0
    threshold = epsilon * (1 - gamma) / r_max
    count = 0
    power: Num = 1
    while power >= threshold:
        power = power * gamma
        count += 1
    return count


def switch_strategy(
    g: StochasticGame,
    almost_sure: MemorylessStrategy,
    optimal: MemorylessStrategy,
    switch_count: int,
) -> FiniteMemoryStrategy:
    """Play `optimal` for the first `switch_count` visits to system states,
    then `almost_sure` forever.  With switch_count = 0 this is exactly
    `almost_sure`."""
    if switch_count < 0:
        raise ValueError(f"switch count must be nonnegative, got {switch_count}")
    memory = tuple(range(switch_count + 1))
    update = {
        (s, m): m + 1 if m < switch_count and s in g.system_states else m
        for s in g.states
        for m in memory
    }
    choice = {
        (s, m): dict((optimal if m < switch_count else almost_sure).choice[s])
        for s in sorted(g.system_states)
        for m in memory
    }
    return FiniteMemoryStrategy(memory, 0, update, choice)


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------


def _check_start_inside(g: StochasticGame, region: frozenset[str]) -> None:
    outside = sorted(set(g.initial) - region)
    if outside:
        raise PreconditionViolatedError(
            f"initial states {outside} admit no almost-sure winning strategy"
        )


def _extended(
    g_in: StochasticGame,
    inner_states: frozenset[str],
    inner_choice: Mapping[str, Mapping[str, Num]],
) -> MemorylessStrategy:
    """Make a strategy total on g_in by playing the least available action at
    system states the synthesis never reaches (no claims hold there)."""
    choice: dict[str, Mapping[str, Num]] = {}
    for s in sorted(g_in.system_states):
        if s in inner_states:
            choice[s] = dict(inner_choice[s])
        else:
            choice[s] = {g_in.actions_of(s)[0]: 1}
    return MemorylessStrategy(choice)


def memoryless_condition_holds(g: StochasticGame, mode: str = "exact") -> bool:
    """Can a memoryless strategy be almost-sure winning while playing optimal
    actions with positive probability everywhere?  Decided on the split game
    with an arbitrary interior coin bias (almost-sure winning depends only on
    supports, so any p in (0, 1) gives the same answer).

    `g` must already be restricted to its almost-sure region.
    """
    vstar = solve_values(g, mode)
    astar = optimal_action_sets(g, vstar)
    split = build_split_game(g, astar, Fraction(1, 2))
    region = almost_sure_region(split.game)
    return set(split.game.initial) <= region.region


def solve_optimal(g_in: StochasticGame, mode: str = "exact", tol: float = 1e-9) -> SynthesisResult:
    """Memoryless strategy that is almost-sure winning and value-optimal, if
    one exists.

    Raises PreconditionViolatedError when some initial state lies outside
    the almost-sure region.  Returns kind "none" when every optimal-action
    restriction destroys almost-sure winning (an epsilon gap is then
    unavoidable and solve_epsilon applies).
    """
    region = almost_sure_region(g_in)
    _check_start_inside(g_in, region.region)
    restricted = induced_subgame(g_in, region.region)
    vstar = solve_values(restricted, mode, tol)
    astar = optimal_action_sets(restricted, vstar)
    pruned = restrict_to_optimal(restricted, astar)
    sub = almost_sure_region(pruned)
    if not set(pruned.initial) <= sub.region:
        return SynthesisResult(KIND_NONE, None, None, vstar, None)
    choice: dict[str, Mapping[str, Num]] = {}
    for s in sorted(g_in.system_states):
        if s in pruned.system_states:
            choice[s] = dict(sub.witness.choice[s])
        elif s in restricted.system_states:
            choice[s] = {astar[s][0]: 1}
        else:
            choice[s] = {g_in.actions_of(s)[0]: 1}
    sigma = MemorylessStrategy(choice)
    values = strategy_value(restricted, sigma, mode, tol)
    verdict = verify_almost_sure(g_in, sigma, g_in.initial)
    if mode == "exact" and (values.values != vstar.values or not verdict.winning):
        raise RuntimeError("optimal synthesis certificate failed")
    return SynthesisResult(KIND_OPTIMAL, sigma, values, vstar, verdict)


def solve_epsilon(
    g_in: StochasticGame, epsilon: Num, mode: str = "exact", tol: float = 1e-9
) -> SynthesisResult:
    """Almost-sure winning strategy within epsilon of the optimal value over
    almost-sure winning strategies.

    Prefers a memoryless strategy obtained by projecting an almost-sure
    strategy of the split game; when none exists, returns the switching
    finite-memory strategy, whose memory size is the switch bound plus one.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    region = almost_sure_region(g_in)
    _check_start_inside(g_in, region.region)
    restricted = induced_subgame(g_in, region.region)
    vstar = solve_values(restricted, mode, tol)
    astar = optimal_action_sets(restricted, vstar)
    p = suboptimality_budget(epsilon, restricted.gamma, restricted.r_max)
    split = build_split_game(restricted, astar, p)
    sub = almost_sure_region(split.game)
    if set(split.game.initial) <= sub.region:
        projected = project_split_strategy(split, sub.witness)
        sigma = _extended(g_in, frozenset(projected.choice), projected.choice)
        values = strategy_value(restricted, sigma, mode, tol)
        verdict = verify_almost_sure(g_in, sigma, g_in.initial)
        if mode == "exact" and (
            not verdict.winning
            or any(values[s] < vstar[s] - epsilon for s in restricted.states)
        ):
            raise RuntimeError("epsilon synthesis certificate failed")
        return SynthesisResult(
            KIND_EPSILON_MEMORYLESS, sigma, values, vstar, verdict,
            epsilon=epsilon, split_prob=p,
        )
    optimal = _extended(
        g_in,
        frozenset(restricted.system_states),
        {s: {astar[s][0]: 1} for s in restricted.system_states},
    )
    count = memory_bound(epsilon, restricted.gamma, restricted.r_max)
    fm = switch_strategy(g_in, region.witness, optimal, count)
    values = strategy_value(restricted, fm, mode, tol)
    verdict = verify_almost_sure(g_in, fm, g_in.initial)
    if mode == "exact" and (
        not verdict.winning
        or any(values[s] < vstar[s] - epsilon for s in restricted.states)
    ):
        raise RuntimeError("epsilon synthesis certificate failed")
    return SynthesisResult(
        KIND_EPSILON_FINITE, fm, values, vstar, verdict,
        epsilon=epsilon, switch_count=count,
    )
