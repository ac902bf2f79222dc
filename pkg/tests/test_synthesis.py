"""Strategy synthesis: the two solvers and their building blocks."""

import random
from fractions import Fraction

import pytest

from rabingames import (
    KIND_EPSILON_FINITE,
    KIND_EPSILON_MEMORYLESS,
    KIND_NONE,
    KIND_OPTIMAL,
    MemorylessStrategy,
    PreconditionViolatedError,
    StochasticGame,
    almost_sure_region,
    build_split_game,
    corpus,
    induced_subgame,
    memory_bound,
    memoryless_condition_holds,
    optimal_action_sets,
    project_split_strategy,
    restrict_to_optimal,
    solve_epsilon,
    solve_optimal,
    solve_values,
    strategy_value,
    suboptimality_budget,
    switch_strategy,
    verify_almost_sure,
)
from randgames import _dist, random_game

FIG1 = corpus.load("fig1")
FIG2 = corpus.load("fig2")
FIG3 = corpus.load("fig3")


def astar_of(g):
    return optimal_action_sets(g, solve_values(g))


def with_losing_initial() -> StochasticGame:
    """fig3 plus a dead-end initial state that cannot win."""
    return StochasticGame.build(
        states=["s0", "s1", "z"],
        system_states=["s0", "s1", "z"],
        initial=["s0", "z"],
        gamma=Fraction(1, 2),
        transitions=[
            ("s0", "a0", "s0", 1),
            ("s0", "a1", "s1", 1),
            ("s1", "a2", "s1", 1, 2),
            ("s1", "a3", "s0", 1),
            ("z", "az", "z", 1),
        ],
        rabin_pairs=[(["s1"], ["s0"])],
    )


# ------------------------------------------------------------------- budget

def test_suboptimality_budget_golden():
    p = suboptimality_budget(Fraction(1, 10), Fraction(9, 10), 1)
    assert p == Fraction(1, 991)
    assert abs(float(p) - 1.00908e-3) < 1e-7


def test_suboptimality_budget_zero_rmax():
    assert suboptimality_budget(Fraction(1, 10), Fraction(1, 2), 0) == 1


def test_suboptimality_budget_nonpositive_denominator():
    # huge epsilon drives the denominator negative; every strategy is fine
    assert suboptimality_budget(100, Fraction(1, 2), 2) == 1


def test_suboptimality_budget_at_value_ceiling():
    # epsilon = R_max/(1-gamma) lands on p = 1 without needing the clamp
    gamma, rmax = Fraction(9, 10), 1
    eps = rmax / (1 - gamma)
    assert suboptimality_budget(eps, gamma, rmax) == 1


def test_suboptimality_budget_clamped():
    gamma, rmax = Fraction(1, 2), 2
    assert suboptimality_budget(7, gamma, rmax) == 1


def test_suboptimality_budget_monotone_in_epsilon():
    gamma, rmax = Fraction(9, 10), 2
    last = 0
    for k in range(1, 12):
        p = suboptimality_budget(Fraction(k, 10), gamma, rmax)
        assert p >= last
        last = p


# ------------------------------------------------------------- memory bound

def test_memory_bound_golden():
    assert memory_bound(1, Fraction(1, 2), 2) == 3


def test_memory_bound_zero_cases():
    assert memory_bound(10, Fraction(1, 2), 2) == 0   # eps >= value ceiling
    assert memory_bound(4, Fraction(1, 2), 2) == 0    # eps*(1-gamma) == R_max
    assert memory_bound(1, Fraction(1, 2), 0) == 0


def test_memory_bound_defining_inequality():
    rng = random.Random(2)
    for _ in range(40):
        gamma = Fraction(rng.randint(1, 9), 10)
        eps = Fraction(rng.randint(1, 50), 10)
        rmax = rng.randint(0, 6)
        c = memory_bound(eps, gamma, rmax)
        assert gamma**c * rmax / (1 - gamma) < eps
        if c > 0:
            # least such C: one step earlier the tail still exceeds eps
            assert gamma ** (c - 1) >= eps * (1 - gamma) / rmax


# ------------------------------------------------------------- split game

def test_split_game_structure_fig3():
    split = build_split_game(FIG3, astar_of(FIG3), Fraction(1, 3))
    g = split.game
    assert set(g.states) == {
        "s0", "s1", "s0#free", "s0#opt", "s1#free", "s1#opt"}
    # each original system state keeps only the coin toss
    for s in ("s0", "s1"):
        assert g.actions_of(s) == (split.split_action,)
        assert g.transition[(s, split.split_action)] == {
            split.free_of[s]: Fraction(1, 3),
            split.opt_of[s]: Fraction(2, 3),
        }
        assert g.reward_of(s, split.split_action, split.free_of[s]) == 0
    # free copies carry every action, opt copies only the optimal ones
    assert g.actions_of("s0#free") == ("a0", "a1")
    assert g.actions_of("s0#opt") == ("a1",)
    assert g.actions_of("s1#free") == ("a2", "a3")
    assert g.actions_of("s1#opt") == ("a2",)
    # copies inherit outgoing rewards and stay out of every Rabin set
    assert g.reward_of("s1#free", "a2", "s1") == 2
    assert g.rabin_pairs == FIG3.rabin_pairs


def test_split_game_env_states_untouched():
    split = build_split_game(FIG1, astar_of(FIG1), Fraction(1, 2))
    g = split.game
    assert g.actions_of("q0") == ("a0",)
    assert g.transition[("q0", "a0")] == FIG1.transition[("q0", "a0")]
    assert "q0" not in split.free_of
    assert g.env_states == frozenset({"q0"})


def test_split_game_p_one_drops_opt_branch():
    split = build_split_game(FIG3, astar_of(FIG3), 1)
    g = split.game
    assert g.transition[("s0", split.split_action)] == {"s0#free": 1}
    # AS analysis of the degenerate split agrees with the original game
    assert almost_sure_region(g).region >= frozenset({"s0", "s1"})


def test_split_game_fresh_names_dodge_collisions():
    g = StochasticGame.build(
        states=["u", "u#free"],
        system_states=["u"],
        initial=["u"],
        gamma=Fraction(1, 2),
        transitions=[
            ("u", "a", "u#free", 1),
            ("u#free", "b", "u", 1),
        ],
        rabin_pairs=[([], ["u"])],
    )
    split = build_split_game(g, astar_of(g), Fraction(1, 2))
    assert split.free_of["u"] != "u#free"
    assert len(set(split.game.states)) == len(split.game.states)


# ------------------------------------------------------------- projection

def test_project_split_strategy_golden():
    p = Fraction(1, 1000)
    split = build_split_game(FIG1, astar_of(FIG1), p)
    sigma_hat = MemorylessStrategy({
        "q1": {split.split_action: 1},
        split.free_of["q1"]: {"a2": 1},
        split.opt_of["q1"]: {"a1": 1},
    })
    sigma = project_split_strategy(split, sigma_hat)
    assert sigma.choice["q1"] == {"a2": p, "a1": 1 - p}


def test_projection_mass_and_normalization():
    rng = random.Random(9)
    for seed in range(20):
        g = random_game(seed)
        if not g.system_states:
            continue
        astar = astar_of(g)
        p = Fraction(rng.randint(1, 9), 10)
        split = build_split_game(g, astar, p)
        sigma_hat = {}
        for s in g.system_states:
            for copy in (split.free_of[s], split.opt_of[s]):
                acts = split.game.actions_of(copy)
                sigma_hat[copy] = dict(zip(acts, _dist(rng, len(acts))))
            sigma_hat[s] = {split.split_action: 1}
        sigma = project_split_strategy(split, MemorylessStrategy(sigma_hat))
        for s in g.system_states:
            dist = sigma.choice[s]
            assert sum(dist.values()) == 1
            off = sum(q for a, q in dist.items() if a not in astar.actions[s])
            assert off <= p


def test_projection_round_trip_preserves_verdict():
    # winning through the split game and winning with the projected
    # strategy in the original game are the same thing
    rng = random.Random(4)
    hits = {True: 0, False: 0}
    for seed in range(30):
        g = random_game(seed)
        region = almost_sure_region(g).region
        if not (g.system_states and region and set(g.initial) <= region):
            continue
        g = induced_subgame(g, region)
        split = build_split_game(g, astar_of(g), Fraction(1, 2))
        sigma_hat = {}
        for s in g.system_states:
            for copy in (split.free_of[s], split.opt_of[s]):
                acts = split.game.actions_of(copy)
                sigma_hat[copy] = dict(zip(acts, _dist(rng, len(acts))))
            sigma_hat[s] = {split.split_action: 1}
        sigma_hat = MemorylessStrategy(sigma_hat)
        inner = verify_almost_sure(split.game, sigma_hat)
        outer = verify_almost_sure(g, project_split_strategy(split, sigma_hat))
        assert inner.winning == outer.winning, seed
        hits[inner.winning] += 1
    assert hits[True] and hits[False]  # both outcomes exercised


# --------------------------------------------------------- switch strategy

def test_switch_strategy_shape_and_update():
    opt = MemorylessStrategy.deterministic({"s0": "a1", "s1": "a2"})
    als = MemorylessStrategy.deterministic({"s0": "a0", "s1": "a3"})
    fm = switch_strategy(FIG3, als, opt, 3)
    assert fm.memory_states == (0, 1, 2, 3)
    assert fm.initial_memory == 0
    assert fm.update[("s0", 0)] == 1
    assert fm.update[("s0", 3)] == 3  # counter saturates
    assert fm.choice[("s1", 2)] == {"a2": 1}
    assert fm.choice[("s1", 3)] == {"a3": 1}


def test_switch_strategy_counts_system_visits_only():
    opt = MemorylessStrategy.deterministic({"q1": "a1"})
    als = MemorylessStrategy.deterministic({"q1": "a2"})
    fm = switch_strategy(FIG1, als, opt, 2)
    assert fm.update[("q0", 0)] == 0  # env visits leave memory alone
    assert fm.update[("q0", 1)] == 1
    assert fm.update[("q1", 0)] == 1


def test_switch_strategy_c_zero_equals_almost_sure():
    als = MemorylessStrategy.deterministic({"s0": "a0", "s1": "a3"})
    opt = MemorylessStrategy.deterministic({"s0": "a1", "s1": "a2"})
    fm = switch_strategy(FIG3, als, opt, 0)
    assert fm.memory_states == (0,)
    for s in FIG3.system_states:
        assert fm.choice[(s, 0)] == als.choice[s]
    assert strategy_value(FIG3, fm).values == strategy_value(FIG3, als).values


def test_switch_strategy_trace_behavior():
    # C=3 on fig3: three rewarded visits, then the reset action forever
    opt = MemorylessStrategy.deterministic({"s0": "a1", "s1": "a2"})
    als = MemorylessStrategy.deterministic({"s0": "a0", "s1": "a3"})
    fm = switch_strategy(FIG3, als, opt, 3)
    s, m = "s0", fm.initial_memory
    played = []
    for _ in range(6):
        a = next(iter(fm.choice[(s, m)]))
        played.append(a)
        m = fm.update.get((s, m), m)
        (s,) = FIG3.successors(s, a)
    assert played == ["a1", "a2", "a2", "a3", "a0", "a0"]


def test_switch_values_approach_optimal_as_c_grows():
    opt = MemorylessStrategy.deterministic({"s0": "a1", "s1": "a2"})
    als = MemorylessStrategy.deterministic({"s0": "a0", "s1": "a3"})
    vstar = solve_values(FIG3).values
    gamma, rmax = Fraction(1, 2), 2
    prev = None
    for c in range(7):
        vals = strategy_value(FIG3, switch_strategy(FIG3, als, opt, c)).values
        for s in FIG3.states:
            assert vals[s] >= vstar[s] - gamma**c * rmax / (1 - gamma)
        if prev is not None:
            assert all(vals[s] >= prev[s] for s in FIG3.states)
        prev = vals


# ---------------------------------------------------------------- Alg. 1

def test_solve_optimal_fig2_golden():
    res = solve_optimal(FIG2)
    assert res.kind == KIND_OPTIMAL
    assert res.strategy.action_of("q0") == "a1"
    assert res.values.values["q0"] == 0
    assert res.as_verdict.winning
    # the unrestricted optimum is far higher; almost-sure play costs it all
    assert res.optimal_values.values["q0"] == 0
    assert solve_values(FIG2).values["q0"] == 9


def test_solve_optimal_fig1_fig3_none():
    for g in (FIG1, FIG3):
        res = solve_optimal(g)
        assert res.kind == KIND_NONE
        assert res.strategy is None


def test_solve_optimal_precondition():
    with pytest.raises(PreconditionViolatedError):
        solve_optimal(with_losing_initial())


def test_solve_optimal_certificates_on_random_games():
    found = 0
    for seed in range(40):
        g = random_game(seed)
        region = almost_sure_region(g).region
        if not region or not set(g.initial) <= region:
            continue
        res = solve_optimal(g)
        if res.kind != KIND_OPTIMAL:
            continue
        found += 1
        restricted = induced_subgame(g, region)
        vstar = solve_values(restricted)
        sv = strategy_value(restricted, res.strategy)
        assert sv.values == vstar.values
        assert verify_almost_sure(g, res.strategy).winning
    assert found >= 5


# ---------------------------------------------------------------- Alg. 2

def test_solve_epsilon_fig1_memoryless_golden():
    res = solve_epsilon(FIG1, Fraction(1, 10))
    assert res.kind == KIND_EPSILON_MEMORYLESS
    assert res.split_prob == Fraction(1, 991)
    assert res.epsilon == Fraction(1, 10)
    dist = res.strategy.choice["q1"]
    assert dist["a2"] == Fraction(1, 991)
    assert dist["a1"] == Fraction(990, 991)
    assert verify_almost_sure(FIG1, res.strategy).winning
    vstar = solve_values(FIG1).values
    for s, v in res.values.values.items():
        assert v >= vstar[s] - Fraction(1, 10)


def test_solve_epsilon_fig3_finite_memory_golden():
    res = solve_epsilon(FIG3, 1)
    assert res.kind == KIND_EPSILON_FINITE
    assert res.switch_count == 3
    assert res.strategy.memory_size == 4
    assert res.as_verdict.winning
    vstar = solve_values(FIG3).values
    assert res.values.values == {"s0": Fraction(3, 2), "s1": Fraction(7, 2)}
    for s in FIG3.states:
        assert res.values.values[s] >= vstar[s] - 1


def test_solve_epsilon_fig3_large_epsilon_degenerates():
    res = solve_epsilon(FIG3, 10)
    assert res.kind == KIND_EPSILON_MEMORYLESS
    assert res.split_prob == 1
    assert res.as_verdict.winning
    vstar = solve_values(FIG3).values
    for s in FIG3.states:
        assert res.values.values[s] >= vstar[s] - 10


def test_solve_epsilon_rejects_nonpositive_epsilon():
    with pytest.raises(ValueError):
        solve_epsilon(FIG1, 0)
    with pytest.raises(ValueError):
        solve_epsilon(FIG1, Fraction(-1, 2))


def test_solve_epsilon_precondition():
    with pytest.raises(PreconditionViolatedError):
        solve_epsilon(with_losing_initial(), 1)


def test_memoryless_condition_goldens():
    assert memoryless_condition_holds(FIG1) is True
    assert memoryless_condition_holds(FIG3) is False
    assert memoryless_condition_holds(
        induced_subgame(FIG2, {"q0", "q2"})) is True


def test_condition_true_when_witness_plays_optimal_actions():
    # the restricted game of fig3 with the reset reward moved onto a3
    # keeps an AS witness inside A*; the condition must then hold
    g = StochasticGame.build(
        states=["s0", "s1"],
        system_states=["s0", "s1"],
        initial=["s0"],
        gamma=Fraction(1, 2),
        transitions=[
            ("s0", "a0", "s0", 1),
            ("s0", "a1", "s1", 1, 2),
            ("s1", "a3", "s0", 1, 2),
        ],
        rabin_pairs=[([], ["s0"])],
    )
    assert memoryless_condition_holds(g) is True


def test_solve_epsilon_kind_matches_condition():
    # whenever the computed budget p is strictly below 1 the solver's
    # choice of kind must agree with the memoryless condition
    for seed in range(40):
        g = random_game(seed)
        region = almost_sure_region(g).region
        if not region or not set(g.initial) <= region:
            continue
        restricted = induced_subgame(g, region)
        eps = Fraction(1, 10)
        p = suboptimality_budget(
            eps, restricted.gamma, restricted.r_max)
        res = solve_epsilon(g, eps)
        if p < 1:
            expected = (
                KIND_EPSILON_MEMORYLESS
                if memoryless_condition_holds(restricted)
                else KIND_EPSILON_FINITE
            )
            assert res.kind == expected, seed
        else:
            assert res.kind == KIND_EPSILON_MEMORYLESS, seed


def test_solve_epsilon_certificates_on_random_games():
    kinds = {KIND_EPSILON_MEMORYLESS: 0, KIND_EPSILON_FINITE: 0}
    for seed in range(60):
        g = random_game(seed)
        region = almost_sure_region(g).region
        if not region or not set(g.initial) <= region:
            continue
        eps = Fraction(1, 4)
        res = solve_epsilon(g, eps)
        kinds[res.kind] += 1
        restricted = induced_subgame(g, region)
        vstar = solve_values(restricted).values
        sv = strategy_value(restricted, res.strategy).values
        for s in restricted.states:
            assert sv[s] >= vstar[s] - eps, (seed, s)
        assert verify_almost_sure(g, res.strategy).winning, seed
    assert kinds[KIND_EPSILON_MEMORYLESS] >= 5
    assert kinds[KIND_EPSILON_FINITE] >= 1


# ------------------------------------------------------ restrict_to_optimal

def test_restrict_to_optimal_fig3():
    restricted = restrict_to_optimal(FIG3, astar_of(FIG3))
    assert restricted.actions_of("s0") == ("a1",)
    assert restricted.actions_of("s1") == ("a2",)
    assert set(restricted.states) == {"s0", "s1"}


def test_restrict_to_optimal_prunes_unreachable():
    sub = induced_subgame(FIG2, {"q0", "q2"})
    restricted = restrict_to_optimal(sub, astar_of(sub))
    assert set(restricted.states) == {"q0", "q2"}
    restricted_full = restrict_to_optimal(FIG2, astar_of(FIG2))
    # A*(q0) = {a0} funnels everything into q1; q2 drops out
    assert set(restricted_full.states) == {"q0", "q1"}


def test_restrict_to_optimal_identity_when_all_optimal():
    g = StochasticGame.build(
        states=["s", "t"],
        system_states=["s"],
        initial=["s"],
        gamma=Fraction(1, 2),
        transitions=[
            ("s", "left", "t", 1, 1),
            ("s", "right", "t", 1, 1),
            ("t", "loop", "s", 1),
        ],
        rabin_pairs=[([], ["t"])],
    )
    assert restrict_to_optimal(g, astar_of(g)) == g
