"""Strategies and the one-player models obtained by fixing them.

A memoryless strategy maps each controlled state to a distribution over its
actions.  A finite-memory strategy additionally carries `memory states`
(integers), a deterministic memory update on (state, memory), and a choice
per (state, memory).  Fixing the system strategy turns a game into an MDP in
which only the environment still chooses; that MDP is what all qualitative
analyses run on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .errors import InvalidStrategyError
from .game import RabinPair, StochasticGame
from .numeric import Num, is_exact

# Label used for the single merged move of a state whose owner no longer chooses.
FIXED_MOVE = "*"


@dataclass(frozen=True)
class MemorylessStrategy:
    """Distribution over actions per controlled state (positive entries only)."""

    choice: Mapping[str, Mapping[str, Num]]

    @staticmethod
    def deterministic(assignment: Mapping[str, str]) -> "MemorylessStrategy":
        return MemorylessStrategy(
            {s: {a: 1} for s, a in sorted(assignment.items())}
        )

    def support(self, s: str) -> tuple[str, ...]:
        return tuple(sorted(self.choice[s]))

    def action_of(self, s: str) -> str:
        """The single action at s; raises if the choice is randomized."""
        (a,) = self.choice[s]
        return a

    @property
    def is_deterministic(self) -> bool:
        return all(len(dist) == 1 for dist in self.choice.values())

    def is_exact(self) -> bool:
        return all(is_exact(p) for dist in self.choice.values() for p in dist.values())


@dataclass(frozen=True)
class FiniteMemoryStrategy:
    """Strategy with integer memory: update is deterministic and total on
    states x memory, choice covers (system state, memory) pairs."""

    memory_states: tuple[int, ...]
    initial_memory: int
    update: Mapping[tuple[str, int], int]
    choice: Mapping[tuple[str, int], Mapping[str, Num]]

    @property
    def memory_size(self) -> int:
        return len(self.memory_states)

    def is_exact(self) -> bool:
        return all(is_exact(p) for dist in self.choice.values() for p in dist.values())


Strategy = MemorylessStrategy | FiniteMemoryStrategy


def check_memoryless(g: StochasticGame, sigma: MemorylessStrategy, controlled: Optional[Iterable[str]] = None) -> None:
    """Raise InvalidStrategyError unless sigma covers every controlled state
    with a positive distribution over available actions summing to one."""
    states = frozenset(g.system_states if controlled is None else controlled)
    for s in sorted(states):
        dist = sigma.choice.get(s)
        if not dist:
            raise InvalidStrategyError(f"strategy misses state {s!r}")
        for a, p in dist.items():
            if a not in g.actions_of(s):
                raise InvalidStrategyError(f"strategy plays unavailable action {a!r} at {s!r}")
            if not (p > 0):
                raise InvalidStrategyError(f"strategy weight of {a!r} at {s!r} must be positive, got {p}")
        total = sum(dist.values())
        exact = all(is_exact(p) for p in dist.values())
        if (exact and total != 1) or (not exact and abs(total - 1) > 1e-9):
            raise InvalidStrategyError(f"strategy weights at {s!r} sum to {total}, not 1")


def check_finite_memory(g: StochasticGame, sigma: FiniteMemoryStrategy) -> None:
    memories = set(sigma.memory_states)
    if sigma.initial_memory not in memories:
        raise InvalidStrategyError("initial memory is not a memory state")
    for s in g.states:
        for m in sigma.memory_states:
            if sigma.update.get((s, m)) not in memories:
                raise InvalidStrategyError(f"memory update missing or invalid at ({s!r}, {m})")
    for s in sorted(g.system_states):
        for m in sigma.memory_states:
            dist = sigma.choice.get((s, m))
            if not dist:
                raise InvalidStrategyError(f"strategy misses ({s!r}, memory {m})")
            for a, p in dist.items():
                if a not in g.actions_of(s):
                    raise InvalidStrategyError(f"strategy plays unavailable action {a!r} at {s!r}")
                if not (p > 0):
                    raise InvalidStrategyError(f"weight of {a!r} at ({s!r}, {m}) must be positive")
            total = sum(dist.values())
            exact = all(is_exact(p) for p in dist.values())
            if (exact and total != 1) or (not exact and abs(total - 1) > 1e-9):
                raise InvalidStrategyError(f"weights at ({s!r}, {m}) sum to {total}, not 1")


# ---------------------------------------------------------------------------
# The MDP left after one side commits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    """One choice of an MDP state: successor distribution plus its expected
    immediate reward."""

    dist: Mapping[str, Num]
    reward: Num

    def support(self) -> frozenset[str]:
        return frozenset(self.dist)


@dataclass(frozen=True)
class EnvMDP:
    """Markov decision process over game states.

    `controlled` states still offer a real choice (labelled by action name);
    every other state carries exactly one merged move labelled FIXED_MOVE
    whose support is the union of the fixed strategy's action supports.
    """

    states: tuple[str, ...]
    controlled: frozenset[str]
    moves: Mapping[str, Mapping[str, Move]]

    def labels(self, s: str) -> tuple[str, ...]:
        return tuple(self.moves[s])

    def reachable(self, seeds: Iterable[str]) -> frozenset[str]:
        frontier = sorted(set(seeds))
        seen = set(frontier)
        while frontier:
            s = frontier.pop()
            for move in self.moves[s].values():
                for t in move.dist:
                    if t not in seen:
                        seen.add(t)
                        frontier.append(t)
        return frozenset(seen)

    def predecessors(self) -> dict[str, set[str]]:
        preds: dict[str, set[str]] = {s: set() for s in self.states}
        for s, moves in self.moves.items():
            for move in moves.values():
                for t in move.dist:
                    preds[t].add(s)
        return preds


def _merged_move(g: StochasticGame, s: str, dist_over_actions: Mapping[str, Num]) -> Move:
    probs: dict[str, Num] = {}
    reward: Num = 0
    for a, w in dist_over_actions.items():
        for t, p in g.transition[(s, a)].items():
            probs[t] = probs.get(t, 0) + w * p
            r = g.reward_of(s, a, t)
            if r != 0:
                reward = reward + w * p * r
    return Move(dist={t: probs[t] for t in sorted(probs)}, reward=reward)


def _action_move(g: StochasticGame, s: str, a: str) -> Move:
    dist = g.transition[(s, a)]
    reward: Num = 0
    for t, p in dist.items():
        r = g.reward_of(s, a, t)
        if r != 0:
            reward = reward + p * r
    return Move(dist=dict(dist), reward=reward)


def fix_system_strategy(g: StochasticGame, sigma: MemorylessStrategy) -> EnvMDP:
    """Commit the system to a memoryless strategy; the environment keeps choosing."""
    check_memoryless(g, sigma)
    moves: dict[str, dict[str, Move]] = {}
    for s in g.states:
        if s in g.system_states:
            moves[s] = {FIXED_MOVE: _merged_move(g, s, sigma.choice[s])}
        else:
            moves[s] = {a: _action_move(g, s, a) for a in g.actions_of(s)}
    return EnvMDP(states=g.states, controlled=g.env_states, moves=moves)


def game_as_mdp(g: StochasticGame) -> EnvMDP:
    """Forget who owns which state: every state keeps all of its actions.
    Used by exhaustive end-component analyses."""
    moves = {
        s: {a: _action_move(g, s, a) for a in g.actions_of(s)}
        for s in g.states
    }
    return EnvMDP(states=g.states, controlled=frozenset(g.states), moves=moves)


# ---------------------------------------------------------------------------
# Product with a finite-memory strategy
# ---------------------------------------------------------------------------


def product_state(s: str, m: int) -> str:
    return f"{s}@{m}"


def split_product_state(name: str) -> tuple[str, int]:
    s, m = name.rsplit("@", 1)
    return s, int(m)


def product_game(
    g: StochasticGame, sigma: FiniteMemoryStrategy
) -> tuple[StochasticGame, MemorylessStrategy]:
    """Unfold a finite-memory strategy into game states (state, memory).

    Memory evolves deterministically with the visited state, so the product
    is again a game of the same kind; the strategy becomes memoryless on it.
    Rabin sets lift memory-obliviously.  The product is not pruned, and its
    choice map is restricted to the product's system states.
    """
    check_finite_memory(g, sigma)
    states = tuple(
        product_state(s, m) for s in g.states for m in sigma.memory_states
    )
    transition: dict[tuple[str, str], dict[str, Num]] = {}
    reward: dict[tuple[str, str, str], Num] = {}
    available: dict[str, tuple[str, ...]] = {}
    for s in g.states:
        for m in sigma.memory_states:
            ps = product_state(s, m)
            m2 = sigma.update[(s, m)]
            available[ps] = g.actions_of(s)
            for a in g.actions_of(s):
                dist = {
                    product_state(t, m2): p for t, p in g.transition[(s, a)].items()
                }
                transition[(ps, a)] = dist
                for t, p in g.transition[(s, a)].items():
                    r = g.reward_of(s, a, t)
                    if r != 0:
                        reward[(ps, a, product_state(t, m2))] = r
    product = StochasticGame(
        states=tuple(sorted(states)),
        system_states=frozenset(
            product_state(s, m) for s in g.system_states for m in sigma.memory_states
        ),
        initial=tuple(sorted(product_state(s, sigma.initial_memory) for s in g.initial)),
        actions=g.actions,
        available={s: available[s] for s in sorted(available)},
        transition=transition,
        reward=reward,
        rabin_pairs=tuple(
            RabinPair(
                frozenset(product_state(s, m) for s in pair.E for m in sigma.memory_states),
                frozenset(product_state(s, m) for s in pair.F for m in sigma.memory_states),
            )
            for pair in g.rabin_pairs
        ),
        gamma=g.gamma,
    )
    flat = MemorylessStrategy(
        {
            product_state(s, m): dict(sigma.choice[(s, m)])
            for s in sorted(g.system_states)
            for m in sigma.memory_states
        }
    )
    return product, flat
