"""Almost-sure analysis of Rabin objectives.

Once the system commits to a strategy, the remaining model is an MDP played
by the environment.  The system wins with probability one from a state iff
the environment cannot reach an end component whose state set satisfies no
Rabin pair ("bad" end component): inside such a component the environment
can make every pair fail forever, and conversely every run eventually
settles into some end component.

The bad-EC search below peels states off maximal end components: a pair
(E, F) can only be satisfied inside a component U when U misses E and meets
F; if no pair does, U itself is bad, and otherwise any bad sub-component
must avoid the F-sets of the satisfied pairs, so those states are removed
and the decomposition is repeated.  Each round removes at least one state,
so the recursion terminates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import BudgetExceededError, RegionEmptyError
from .game import RabinPair, StochasticGame
from .strategy import (
    EnvMDP,
    FiniteMemoryStrategy,
    MemorylessStrategy,
    Strategy,
    fix_system_strategy,
    product_game,
)

DEFAULT_STRATEGY_BUDGET = 10**6


@dataclass(frozen=True)
class EndComponent:
    """A set of states the play can stay in forever, together with the
    actions each controlled state may keep using without leaving it."""

    states: frozenset[str]
    actions: Mapping[str, frozenset[str]]


@dataclass(frozen=True)
class ASVerdict:
    winning: bool
    witness_bad_ec: Optional[EndComponent]
    per_state_winning: Mapping[str, bool]


@dataclass(frozen=True)
class ASRegionResult:
    region: frozenset[str]
    witness: MemorylessStrategy


def rabin_good(states: Iterable[str], pairs: Sequence[RabinPair]) -> Optional[int]:
    """1-based index of the first pair satisfied by visiting exactly `states`
    forever (misses E, meets F), or None if no pair is."""
    u = frozenset(states)
    for i, pair in enumerate(pairs, start=1):
        if not (u & pair.E) and (u & pair.F):
            return i
    return None


# ---------------------------------------------------------------------------
# End-component machinery
# ---------------------------------------------------------------------------


def _strongly_connected_components(nodes: Sequence[str], edges: Mapping[str, Iterable[str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative to keep deep benches off the stack."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = itertools.count()

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(edges.get(root, ())))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = next(counter)
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(edges.get(succ, ()))))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                sccs.append(sorted(comp))
    return sccs


def maximal_end_components(mdp: EnvMDP, within: Optional[Iterable[str]] = None) -> list[EndComponent]:
    """Maximal end components of the MDP restricted to `within` (default: all
    states), sorted by their least state."""
    candidates: list[set[str]] = [set(mdp.states if within is None else within)]
    found: list[EndComponent] = []
    while candidates:
        u = candidates.pop()
        # Keep only moves whose support stays in u; discard states left with
        # no move, repeating since each removal can strand its predecessors.
        while True:
            allowed = {
                s: {label for label, mv in mdp.moves[s].items() if mv.support() <= u}
                for s in u
            }
            dead = {s for s, labels in allowed.items() if not labels}
            if not dead:
                break
            u -= dead
        if not u:
            continue
        edges = {
            s: sorted({t for label in allowed[s] for t in mdp.moves[s][label].dist})
            for s in u
        }
        sccs = _strongly_connected_components(sorted(u), edges)
        if len(sccs) == 1 and set(sccs[0]) == u:
            found.append(
                EndComponent(
                    states=frozenset(u),
                    actions={s: frozenset(allowed[s]) for s in sorted(u) if s in mdp.controlled},
                )
            )
        else:
            candidates.extend(set(c) for c in sccs if set(c) != u)
    return sorted(found, key=lambda ec: sorted(ec.states))


def _bad_sub_ec(mdp: EnvMDP, component: EndComponent, pairs: Sequence[RabinPair]) -> Optional[EndComponent]:
    """Search `component` (an end component) for a sub-component satisfying no pair."""
    u = component.states
    good = [pair for pair in pairs if not (u & pair.E) and (u & pair.F)]
    if not good:
        return component
    trimmed = u - frozenset().union(*(pair.F for pair in good))
    if not trimmed:
        return None
    for sub in maximal_end_components(mdp, trimmed):
        hit = _bad_sub_ec(mdp, sub, pairs)
        if hit is not None:
            return hit
    return None


def find_bad_ec(
    mdp: EnvMDP, pairs: Sequence[RabinPair], from_states: Iterable[str]
) -> Optional[EndComponent]:
    """Some bad end component reachable from `from_states`, or None.

    An end component intersecting the forward closure lies entirely inside
    it (it is strongly connected through real edges), so it suffices to
    scan maximal end components that touch the closure.
    """
    reach = mdp.reachable(from_states)
    for component in maximal_end_components(mdp):
        if component.states & reach:
            hit = _bad_sub_ec(mdp, component, pairs)
            if hit is not None:
                return hit
    return None


def _losing_states(mdp: EnvMDP, pairs: Sequence[RabinPair]) -> frozenset[str]:
    """States from which the environment can reach a bad end component."""
    bad_cores: set[str] = set()
    for component in maximal_end_components(mdp):
        if _bad_sub_ec(mdp, component, pairs) is not None:
            # From anywhere in the component every member is reachable, so
            # reaching the component at all means reaching its bad part.
            bad_cores |= component.states
    if not bad_cores:
        return frozenset()
    preds = mdp.predecessors()
    frontier = sorted(bad_cores)
    seen = set(frontier)
    while frontier:
        s = frontier.pop()
        for p in preds[s]:
            if p not in seen:
                seen.add(p)
                frontier.append(p)
    return frozenset(seen)


# ---------------------------------------------------------------------------
# Verification and region computation
# ---------------------------------------------------------------------------


def verify_almost_sure(
    g: StochasticGame,
    sigma: Strategy,
    check_states: Optional[Iterable[str]] = None,
) -> ASVerdict:
    """Does `sigma` win with probability one from every checked state
    (default: the initial states) against every environment strategy?

    Finite-memory strategies are checked on the product with their memory;
    the per-state map is then reported at the initial memory, while a
    witness bad end component keeps product names ("state@memory").
    """
    check = tuple(sorted(set(g.initial if check_states is None else check_states)))
    if isinstance(sigma, FiniteMemoryStrategy):
        product, flat = product_game(g, sigma)
        lifted = [f"{s}@{sigma.initial_memory}" for s in check]
        inner = verify_almost_sure(product, flat, lifted)
        per_state = {
            s: inner.per_state_winning[f"{s}@{sigma.initial_memory}"] for s in g.states
        }
        return ASVerdict(inner.winning, inner.witness_bad_ec, per_state)
    mdp = fix_system_strategy(g, sigma)
    losing = _losing_states(mdp, g.rabin_pairs)
    per_state = {s: s not in losing for s in g.states}
    winning = all(per_state[s] for s in check)
    witness = None
    if not winning:
        witness = find_bad_ec(mdp, g.rabin_pairs, [s for s in check if s in losing])
    return ASVerdict(winning, witness, per_state)


def _enumerate_assignments(g: StochasticGame, budget: int):
    sys_states = sorted(g.system_states)
    total = 1
    for s in sys_states:
        total *= len(g.actions_of(s))
    if total > budget:
        raise BudgetExceededError(
            f"almost-sure region enumeration needs {total} strategies, "
            f"budget is {budget}"
        )
    for combo in itertools.product(*(g.actions_of(s) for s in sys_states)):
        yield dict(zip(sys_states, combo))


def almost_sure_region(
    g: StochasticGame,
    *,
    require_nonempty: bool = False,
    max_strategies: int = DEFAULT_STRATEGY_BUDGET,
) -> ASRegionResult:
    """All states from which the system can win almost surely, with one
    deterministic memoryless strategy winning from every one of them.

    Deterministic memoryless strategies suffice for almost-sure Rabin
    winning, so the region is the union of the winning sets of the finitely
    many such strategies.  The witness prefers, at each region state, the
    least action played there by any strategy winning from that state; the
    merged strategy is re-verified and, should that ever fail, the single
    enumerated strategy with the largest winning set is returned instead.
    """
    sys_sorted = sorted(g.system_states)
    region: set[str] = set()
    winning_actions: dict[str, set[str]] = {s: set() for s in sys_sorted}
    best_assignment: Optional[dict[str, str]] = None
    best_win: frozenset[str] = frozenset()
    for assignment in _enumerate_assignments(g, max_strategies):
        sigma = MemorylessStrategy.deterministic(assignment)
        losing = _losing_states(fix_system_strategy(g, sigma), g.rabin_pairs)
        won = frozenset(g.states) - losing
        region |= won
        for s in sys_sorted:
            if s in won:
                winning_actions[s].add(assignment[s])
        if len(won) > len(best_win):
            best_assignment, best_win = assignment, won
    region_frozen = frozenset(region)
    if require_nonempty and not region_frozen:
        raise RegionEmptyError("no state admits an almost-sure winning strategy")

    def pick(s: str) -> str:
        if s in region_frozen and winning_actions[s]:
            return min(winning_actions[s])
        return g.actions_of(s)[0]

    merged = MemorylessStrategy.deterministic({s: pick(s) for s in sys_sorted})
    if not region_frozen:
        return ASRegionResult(region_frozen, merged)
    if verify_almost_sure(g, merged, region_frozen).winning:
        return ASRegionResult(region_frozen, merged)
    # Fallback: memoryless almost-sure strategies are uniform across the
    # region, so the best single enumerated strategy must cover it.
    assert best_assignment is not None
    single = MemorylessStrategy.deterministic(
        {s: best_assignment.get(s, g.actions_of(s)[0]) for s in sys_sorted}
    )
    if best_win != region_frozen or not verify_almost_sure(g, single, region_frozen).winning:
        raise RuntimeError("almost-sure region witness could not be certified")
    return ASRegionResult(region_frozen, single)
