"""Brute-force oracles: enumeration-based reference answers."""

from fractions import Fraction

import pytest

from rabingames import (
    BudgetExceededError,
    MemorylessStrategy,
    OracleBudget,
    almost_sure_region,
    corpus,
    enumerate_all_ecs,
    enumerate_det_memoryless,
    fix_system_strategy,
    game_as_mdp,
    oracle_as_region,
    oracle_exact_values,
    solve_values,
)
from randgames import random_game

FIG1 = corpus.load("fig1")
FIG2 = corpus.load("fig2")
FIG3 = corpus.load("fig3")


def test_enumerate_all_ecs_fig3():
    ecs = {ec.states: ec.actions for ec in enumerate_all_ecs(game_as_mdp(FIG3))}
    assert set(ecs) == {
        frozenset({"s0"}),
        frozenset({"s1"}),
        frozenset({"s0", "s1"}),
    }
    assert ecs[frozenset({"s0"})]["s0"] == frozenset({"a0"})
    both = ecs[frozenset({"s0", "s1"})]
    assert both["s0"] == frozenset({"a0", "a1"})
    assert both["s1"] == frozenset({"a2", "a3"})


def test_enumerate_all_ecs_after_fixing_strategy():
    mdp = fix_system_strategy(
        FIG1, MemorylessStrategy.deterministic({"q1": "a2"}))
    assert [ec.states for ec in enumerate_all_ecs(mdp)] == [
        frozenset({"q0", "q1"})
    ]


def test_enumerate_all_ecs_probabilistic_support_counts():
    # q0's coin reaches q1, so {q0} alone has no staying action
    mdp = game_as_mdp(FIG1)
    states = {ec.states for ec in enumerate_all_ecs(mdp)}
    assert frozenset({"q0"}) not in states
    assert frozenset({"q1"}) in states  # a1 self loop
    assert frozenset({"q0", "q1"}) in states


def test_enumerate_det_memoryless_counts():
    assert len(list(enumerate_det_memoryless(FIG1))) == 2
    assert len(list(enumerate_det_memoryless(FIG2))) == 2
    assert len(list(enumerate_det_memoryless(FIG3))) == 4


def test_enumerate_det_memoryless_fig1_choices():
    sigmas = [s.action_of("q1") for s in enumerate_det_memoryless(FIG1)]
    assert sorted(sigmas) == ["a1", "a2"]


def test_enumerated_strategies_are_deterministic_and_total():
    for seed in range(6):
        g = random_game(seed)
        for sigma in enumerate_det_memoryless(g):
            assert sigma.is_deterministic
            assert set(sigma.choice) == set(g.system_states)


def test_oracle_region_goldens():
    assert oracle_as_region(FIG1) == frozenset({"q0", "q1"})
    assert oracle_as_region(FIG2) == frozenset({"q0", "q2"})
    assert oracle_as_region(FIG3) == frozenset({"s0", "s1"})


def test_oracle_values_goldens():
    assert oracle_exact_values(FIG1) == {
        "q0": Fraction(90, 1009), "q1": Fraction(10)}
    assert oracle_exact_values(FIG2) == {
        "q0": Fraction(9), "q1": Fraction(10), "q2": Fraction(0)}
    assert oracle_exact_values(FIG3) == {"s0": Fraction(2), "s1": Fraction(4)}


def test_budget_on_state_count():
    with pytest.raises(BudgetExceededError):
        enumerate_all_ecs(game_as_mdp(FIG3), OracleBudget(max_states=1))
    with pytest.raises(BudgetExceededError):
        oracle_as_region(FIG3, OracleBudget(max_states=1))


def test_budget_on_strategy_count():
    with pytest.raises(BudgetExceededError):
        oracle_exact_values(FIG2, OracleBudget(max_strategies=1))
    with pytest.raises(BudgetExceededError):
        list(enumerate_det_memoryless(FIG3, OracleBudget(max_strategies=3)))


def test_oracles_double_check_each_other():
    # the two independent routes agree on fresh games (the acceptance
    # suite runs this wider); exercised here to keep the oracles honest
    for seed in range(300, 320):
        g = random_game(seed)
        assert oracle_as_region(g) == almost_sure_region(g).region, seed
        assert oracle_exact_values(g) == solve_values(g).values, seed
