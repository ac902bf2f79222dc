"""Core model: two-player turn-based stochastic games with Rabin pairs.

States and actions are strings; every container is kept in sorted order so
that all downstream iteration (and therefore every synthesized strategy) is
deterministic.  Games are immutable values; operations return new games.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Mapping, Optional

from .errors import NotClosedError
from .numeric import Num, as_fraction, is_exact

FLOAT_DIST_TOL = 1e-9


@dataclass(frozen=True)
class RabinPair:
    """Acceptance pair (E, F): a run wins via this pair when it visits F
    infinitely often and E only finitely often."""

    E: frozenset[str]
    F: frozenset[str]

    @staticmethod
    def of(E: Iterable[str], F: Iterable[str]) -> "RabinPair":
        return RabinPair(frozenset(E), frozenset(F))


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.violations


@dataclass(frozen=True, eq=True)
class StochasticGame:
    """A turn-based stochastic Rabin game with discounted rewards.

    Fields are normalized: `states`, `actions`, `initial` and each
    `available(s)` are sorted tuples; transition distributions keep only
    positive-probability successors (sorted); `reward` stores only nonzero
    entries.  Numbers are int/Fraction in exact mode or float otherwise.
    """

    states: tuple[str, ...]
    system_states: frozenset[str]
    initial: tuple[str, ...]
    actions: tuple[str, ...]
    available: Mapping[str, tuple[str, ...]]
    transition: Mapping[tuple[str, str], Mapping[str, Num]]
    reward: Mapping[tuple[str, str, str], Num]
    rabin_pairs: tuple[RabinPair, ...]
    gamma: Num

    @staticmethod
    def build(
        *,
        states: Iterable[str],
        system_states: Iterable[str],
        initial: Iterable[str],
        gamma: Num,
        transitions: Iterable[tuple],
        rabin_pairs: Iterable[tuple[Iterable[str], Iterable[str]]],
    ) -> "StochasticGame":
        """Assemble a game from transition rows (from, action, to, prob[, reward]).

        Zero rewards may be omitted; zero or negative probabilities and
        duplicate rows are rejected here, everything else is left to
        validate_game.
        """
        state_tuple = tuple(sorted(set(states)))
        trans: dict[tuple[str, str], dict[str, Num]] = {}
        rew: dict[tuple[str, str, str], Num] = {}
        action_names: set[str] = set()
        for row in transitions:
            if len(row) == 4:
                s, a, t, p = row
                r: Num = 0
            else:
                s, a, t, p, r = row
            if not (p > 0):
                raise ValueError(f"transition {s}/{a}->{t}: probability must be positive, got {p!r}")
            dist = trans.setdefault((s, a), {})
            if t in dist:
                raise ValueError(f"duplicate transition row {s}/{a}->{t}")
            dist[t] = p
            action_names.add(a)
            if r != 0:
                rew[(s, a, t)] = r
        available = {}
        for s in state_tuple:
            acts = sorted({a for (q, a) in trans if q == s})
            if acts:
                available[s] = tuple(acts)
        transition = {
            (s, a): {t: dist[t] for t in sorted(dist)}
            for (s, a), dist in sorted(trans.items())
        }
        return StochasticGame(
            states=state_tuple,
            system_states=frozenset(system_states),
            initial=tuple(sorted(set(initial))),
            actions=tuple(sorted(action_names)),
            available=available,
            transition=transition,
            reward=dict(sorted(rew.items())),
            rabin_pairs=tuple(RabinPair.of(E, F) for E, F in rabin_pairs),
            gamma=gamma,
        )

    # ----- basic accessors -------------------------------------------------

    @property
    def env_states(self) -> frozenset[str]:
        return frozenset(self.states) - self.system_states

    def actions_of(self, s: str) -> tuple[str, ...]:
        return self.available.get(s, ())

    def successors(self, s: str, a: str) -> tuple[str, ...]:
        return tuple(self.transition[(s, a)])

    def reward_of(self, s: str, a: str, t: str) -> Num:
        return self.reward.get((s, a, t), 0)

    @cached_property
    def r_max(self) -> Num:
        """Largest reward on any feasible transition (0 for reward-free games)."""
        best: Num = 0
        for (s, a, t), r in self.reward.items():
            if r > best:
                best = r
        return best

    @cached_property
    def is_exact(self) -> bool:
        nums = [self.gamma]
        nums.extend(p for dist in self.transition.values() for p in dist.values())
        nums.extend(self.reward.values())
        return all(is_exact(x) for x in nums)

    # ----- conversions ------------------------------------------------------

    def to_exact(self) -> "StochasticGame":
        """Convert all numbers to Fractions (floats keep their binary value)."""
        return replace(
            self,
            gamma=as_fraction(self.gamma),
            transition={
                key: {t: as_fraction(p) for t, p in dist.items()}
                for key, dist in self.transition.items()
            },
            reward={key: as_fraction(r) for key, r in self.reward.items()},
        )

    def to_float(self) -> "StochasticGame":
        return replace(
            self,
            gamma=float(self.gamma),
            transition={
                key: {t: float(p) for t, p in dist.items()}
                for key, dist in self.transition.items()
            },
            reward={key: float(r) for key, r in self.reward.items()},
        )

    def with_gamma(self, gamma: Num) -> "StochasticGame":
        return replace(self, gamma=gamma)


def validate_game(g: StochasticGame) -> ValidationReport:
    """Check every structural invariant; the report is empty iff the game is valid."""
    bad: list[str] = []
    state_set = set(g.states)
    if not g.states:
        bad.append("state set is empty")
    if not (0 < g.gamma < 1):
        bad.append(f"gamma must lie strictly between 0 and 1, got {g.gamma}")
    for s in sorted(g.system_states - state_set):
        bad.append(f"system state {s!r} is not a state")
    if not g.initial:
        bad.append("initial state set is empty")
    for s in g.initial:
        if s not in state_set:
            bad.append(f"initial state {s!r} is not a state")
    for s in g.states:
        if not g.actions_of(s):
            bad.append(f"state {s!r} has no available action")
    for (s, a), dist in g.transition.items():
        if s not in state_set:
            bad.append(f"transition source {s!r} is not a state")
            continue
        if not dist:
            bad.append(f"action {a!r} at {s!r} has an empty distribution")
            continue
        exact = all(is_exact(p) for p in dist.values())
        for t, p in dist.items():
            if t not in state_set:
                bad.append(f"successor {t!r} of {s!r}/{a!r} is not a state")
            if not (p > 0):
                bad.append(f"probability of {s!r}/{a!r}->{t!r} must be positive, got {p}")
        total = sum(dist.values())
        if exact:
            if total != 1:
                bad.append(f"distribution at {s!r}/{a!r} sums to {total}, not 1")
        elif abs(total - 1) > FLOAT_DIST_TOL:
            bad.append(f"distribution at {s!r}/{a!r} sums to {float(total)}, not 1")
    for (s, a, t), r in g.reward.items():
        if r < 0:
            bad.append(f"reward of {s!r}/{a!r}->{t!r} must be nonnegative, got {r}")
        if t not in g.transition.get((s, a), {}):
            bad.append(f"reward on missing transition {s!r}/{a!r}->{t!r}")
    for i, pair in enumerate(g.rabin_pairs):
        for s in sorted((pair.E | pair.F) - state_set):
            bad.append(f"Rabin pair {i + 1} mentions unknown state {s!r}")
        if pair.E & pair.F:
            bad.append(f"Rabin pair {i + 1} has overlapping E and F")
    if g.states and g.initial and all(s in state_set for s in g.initial):
        unreachable = sorted(state_set - reachable_states(g))
        for s in unreachable:
            bad.append(f"state {s!r} is unreachable from the initial states")
    return ValidationReport(tuple(bad))


def reachable_states(
    g: StochasticGame,
    seeds: Optional[Iterable[str]] = None,
    action_filter: Optional[Mapping[str, Iterable[str]]] = None,
) -> frozenset[str]:
    """Forward closure from `seeds` (default: initial states).

    `action_filter` restricts which actions are followed at the listed
    states; unlisted states follow every available action.
    """
    frontier = sorted(set(g.initial if seeds is None else seeds))
    seen = set(frontier)
    while frontier:
        s = frontier.pop()
        acts = g.actions_of(s) if action_filter is None or s not in action_filter else action_filter[s]
        for a in acts:
            for t in g.transition.get((s, a), ()):
                if t not in seen:
                    seen.add(t)
                    frontier.append(t)
    return frozenset(seen)


def induced_subgame(g: StochasticGame, subset: Iterable[str]) -> StochasticGame:
    """Restrict the game to `subset`, keeping only actions whose support stays inside.

    Raises NotClosedError if an environment state would lose an action or a
    system state would lose all of them; environment decisions may never be
    removed by restriction.
    """
    sub = frozenset(subset)
    missing = sub - set(g.states)
    if missing:
        raise ValueError(f"subset mentions unknown states {sorted(missing)}")
    if not sub:
        raise ValueError("cannot restrict to an empty state set")
    available: dict[str, tuple[str, ...]] = {}
    for s in sorted(sub):
        staying = tuple(
            a for a in g.actions_of(s) if set(g.transition[(s, a)]) <= sub
        )
        if s in g.system_states:
            if not staying:
                raise NotClosedError(f"system state {s!r} has no action staying in the subset")
        elif len(staying) != len(g.actions_of(s)):
            raise NotClosedError(f"environment state {s!r} has an action leaving the subset")
        available[s] = staying
    transition = {
        (s, a): dict(g.transition[(s, a)])
        for s in sorted(sub)
        for a in available[s]
    }
    reward = {
        (s, a, t): r
        for (s, a, t), r in g.reward.items()
        if s in sub and (s, a) in transition and t in sub
    }
    return StochasticGame(
        states=tuple(sorted(sub)),
        system_states=g.system_states & sub,
        initial=tuple(s for s in g.initial if s in sub),
        actions=tuple(sorted({a for (_, a) in transition})),
        available=available,
        transition=transition,
        reward=reward,
        rabin_pairs=tuple(RabinPair(p.E & sub, p.F & sub) for p in g.rabin_pairs),
        gamma=g.gamma,
    )


def prune_unreachable(g: StochasticGame) -> StochasticGame:
    """Drop states unreachable from the initial states (availability is unchanged:
    the reachable set is forward-closed, so it always induces a subgame)."""
    keep = reachable_states(g)
    if keep == set(g.states):
        return g
    return induced_subgame(g, keep)
