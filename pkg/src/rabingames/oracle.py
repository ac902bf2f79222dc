"""Brute-force reference engines.

These deliberately share no algorithmic machinery with the production code
paths: end components are found by checking every subset of states, regions
by trying every deterministic memoryless strategy, and optimal values by
evaluating every deterministic strategy pair.  Deterministic memoryless
strategies suffice on both sides for these quantities, which is what makes
the enumerations complete.  Everything here is exponential and guarded by
an explicit budget; it exists to cross-check the real algorithms, both in
the test suite and behind the CLI's --engine oracle flag.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import BudgetExceededError
from .game import StochasticGame
from .numeric import as_fraction, is_exact, solve_linear
from .qualitative import EndComponent, rabin_good
from .strategy import EnvMDP, MemorylessStrategy, fix_system_strategy


@dataclass(frozen=True)
class OracleBudget:
    max_states: int = 12
    max_strategies: int = 10**6


def _check_state_budget(n: int, budget: OracleBudget) -> None:
    if n > budget.max_states:
        raise BudgetExceededError(
            f"oracle subset enumeration over {n} states exceeds the budget of "
            f"{budget.max_states}"
        )


def _choice_count(counts) -> int:
    total = 1
    for c in counts:
        total *= c
    return total


def enumerate_det_memoryless(
    g: StochasticGame, budget: Optional[OracleBudget] = None
) -> Iterator[MemorylessStrategy]:
    """All deterministic memoryless system strategies, lexicographically."""
    b = budget or OracleBudget()
    sys_states = sorted(g.system_states)
    total = _choice_count(len(g.actions_of(s)) for s in sys_states)
    if total > b.max_strategies:
        raise BudgetExceededError(
            f"{total} deterministic strategies exceed the budget of {b.max_strategies}"
        )
    for combo in itertools.product(*(g.actions_of(s) for s in sys_states)):
        yield MemorylessStrategy.deterministic(dict(zip(sys_states, combo)))


def enumerate_all_ecs(mdp: EnvMDP, budget: Optional[OracleBudget] = None) -> list[EndComponent]:
    """Every end component, by brute force over state subsets.

    A subset is an end component iff keeping all moves that stay inside it
    leaves every member at least one move and a strongly connected graph.
    """
    b = budget or OracleBudget()
    _check_state_budget(len(mdp.states), b)
    found: list[EndComponent] = []
    states = sorted(mdp.states)
    for size in range(1, len(states) + 1):
        for subset in itertools.combinations(states, size):
            u = frozenset(subset)
            allowed = {
                s: frozenset(
                    label for label, mv in mdp.moves[s].items() if mv.support() <= u
                )
                for s in subset
            }
            if any(not labels for labels in allowed.values()):
                continue
            succ = {
                s: {t for label in allowed[s] for t in mdp.moves[s][label].dist}
                for s in subset
            }
            if all(_reaches_all(s, u, succ) for s in subset):
                found.append(
                    EndComponent(
                        states=u,
                        actions={s: allowed[s] for s in subset if s in mdp.controlled},
                    )
                )
    return found


def _reaches_all(start: str, u: frozenset[str], succ) -> bool:
    seen = {start}
    frontier = [start]
    while frontier:
        s = frontier.pop()
        for t in succ[s]:
            if t not in seen:
                seen.add(t)
                frontier.append(t)
    return seen >= u


def oracle_as_region(g: StochasticGame, budget: Optional[OracleBudget] = None) -> frozenset[str]:
    """States from which some deterministic memoryless strategy wins almost
    surely: no end component violating every Rabin pair stays reachable."""
    b = budget or OracleBudget()
    _check_state_budget(len(g.states), b)
    region: set[str] = set()
    for sigma in enumerate_det_memoryless(g, b):
        mdp = fix_system_strategy(g, sigma)
        bad: set[str] = set()
        for ec in enumerate_all_ecs(mdp, b):
            if rabin_good(ec.states, g.rabin_pairs) is None:
                bad |= ec.states
        blocked = _backward_closure(mdp, bad)
        region |= set(g.states) - blocked
    return frozenset(region)


def _backward_closure(mdp: EnvMDP, targets: set[str]) -> set[str]:
    preds: dict[str, set[str]] = {s: set() for s in mdp.states}
    for s, moves in mdp.moves.items():
        for mv in moves.values():
            for t in mv.dist:
                preds[t].add(s)
    seen = set(targets)
    frontier = sorted(targets)
    while frontier:
        s = frontier.pop()
        for p in preds[s]:
            if p not in seen:
                seen.add(p)
                frontier.append(p)
    return seen


def _pair_value(
    g: StochasticGame, assignment: dict[str, str]
) -> dict[str, Fraction]:
    """Discounted value of the Markov chain in which every state plays its
    assigned action (rational linear solve)."""
    states = g.states
    index = {s: i for i, s in enumerate(states)}
    gamma = as_fraction(g.gamma)
    matrix = []
    rhs = []
    for s in states:
        a = assignment[s]
        row = [Fraction(0)] * len(states)
        row[index[s]] += 1
        expected: Fraction = Fraction(0)
        for t, p in g.transition[(s, a)].items():
            pf = as_fraction(p)
            row[index[t]] -= gamma * pf
            r = g.reward_of(s, a, t)
            if r != 0:
                expected += pf * as_fraction(r)
        matrix.append(row)
        rhs.append(expected)
    solution = solve_linear(matrix, rhs)
    return {s: solution[index[s]] for s in states}


def oracle_exact_values(
    g: StochasticGame, budget: Optional[OracleBudget] = None
) -> dict[str, Fraction]:
    """Optimal values by maximin over deterministic memoryless strategy pairs.

    Both players have deterministic memoryless optimal strategies in
    discounted games, so the pointwise max over system choices of the
    pointwise min over environment choices is the optimal value function.
    """
    b = budget or OracleBudget()
    nums = [g.gamma]
    nums.extend(p for dist in g.transition.values() for p in dist.values())
    nums.extend(g.reward.values())
    if not all(is_exact(x) for x in nums):
        raise TypeError("oracle_exact_values requires a rational game")
    sys_states = sorted(g.system_states)
    env_states = sorted(g.env_states)
    pairs = _choice_count(len(g.actions_of(s)) for s in g.states)
    if pairs > b.max_strategies:
        raise BudgetExceededError(
            f"{pairs} strategy pairs exceed the budget of {b.max_strategies}"
        )
    best: dict[str, Fraction] = {}
    for sys_combo in itertools.product(*(g.actions_of(s) for s in sys_states)):
        assignment = dict(zip(sys_states, sys_combo))
        worst: dict[str, Fraction] = {}
        for env_combo in itertools.product(*(g.actions_of(s) for s in env_states)):
            assignment.update(zip(env_states, env_combo))
            values = _pair_value(g, assignment)
            for s, v in values.items():
                if s not in worst or v < worst[s]:
                    worst[s] = v
        for s, v in worst.items():
            if s not in best or v > best[s]:
                best[s] = v
    return best
