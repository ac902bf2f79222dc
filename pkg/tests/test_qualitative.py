"""Qualitative analysis: end components, bad-EC search, almost-sure checks."""

from fractions import Fraction

import pytest

from rabingames import (
    BudgetExceededError,
    MemorylessStrategy,
    RabinPair,
    RegionEmptyError,
    StochasticGame,
    almost_sure_region,
    corpus,
    find_bad_ec,
    fix_system_strategy,
    game_as_mdp,
    maximal_end_components,
    oracle_as_region,
    rabin_good,
    verify_almost_sure,
)
from randgames import random_det_strategy, random_game

FIG1 = corpus.load("fig1")
FIG2 = corpus.load("fig2")
FIG3 = corpus.load("fig3")


# ---------------------------------------------------------------- rabin_good

def test_rabin_good_returns_one_based_index():
    pairs = (RabinPair.of(["s1"], ["s0"]), RabinPair.of([], ["s1"]))
    assert rabin_good({"s1"}, pairs) == 2
    assert rabin_good({"s0"}, pairs) == 1


def test_rabin_good_first_match_wins():
    pairs = (RabinPair.of([], ["x"]), RabinPair.of([], ["x", "y"]))
    assert rabin_good({"x"}, pairs) == 1


def test_rabin_good_none_when_no_pair_fits():
    assert rabin_good({"s1"}, FIG3.rabin_pairs) is None
    assert rabin_good({"q1"}, FIG1.rabin_pairs) is None
    assert rabin_good({"x"}, ()) is None


def test_rabin_good_avoid_set_blocks():
    pairs = (RabinPair.of(["s1"], ["s0"]),)
    assert rabin_good({"s0"}, pairs) == 1
    assert rabin_good({"s0", "s1"}, pairs) is None


# ------------------------------------------------------------ end components

def test_mecs_of_fig3_full_mdp():
    mecs = maximal_end_components(game_as_mdp(FIG3))
    assert len(mecs) == 1
    (mec,) = mecs
    assert mec.states == frozenset({"s0", "s1"})
    assert mec.actions["s0"] == frozenset({"a0", "a1"})
    assert mec.actions["s1"] == frozenset({"a2", "a3"})


def test_mecs_respect_within():
    mecs = maximal_end_components(game_as_mdp(FIG3), within={"s0"})
    assert [m.states for m in mecs] == [frozenset({"s0"})]
    assert mecs[0].actions["s0"] == frozenset({"a0"})


def test_mecs_of_fixed_strategy_chain():
    # sigma = (a1, a2) funnels fig3 into the s1 self loop
    mdp = fix_system_strategy(FIG3, MemorylessStrategy.deterministic(
        {"s0": "a1", "s1": "a2"}))
    mecs = maximal_end_components(mdp)
    assert [m.states for m in mecs] == [frozenset({"s1"})]


def test_mec_with_probabilistic_exit_is_not_closed():
    # the only action at u leaks to the sink half the time, so {u} is no EC
    g = StochasticGame.build(
        states=["u", "z"],
        system_states=[],
        initial=["u"],
        gamma=Fraction(1, 2),
        transitions=[
            ("u", "a", "u", Fraction(1, 2)),
            ("u", "a", "z", Fraction(1, 2)),
            ("z", "b", "z", 1),
        ],
        rabin_pairs=[],
    )
    mecs = maximal_end_components(game_as_mdp(g))
    assert [m.states for m in mecs] == [frozenset({"z"})]


# ---------------------------------------------------------------- bad-EC search

def test_find_bad_ec_fig3_goldens():
    good = fix_system_strategy(FIG3, MemorylessStrategy.deterministic(
        {"s0": "a0", "s1": "a3"}))
    assert find_bad_ec(good, FIG3.rabin_pairs, FIG3.states) is None

    bad = fix_system_strategy(FIG3, MemorylessStrategy.deterministic(
        {"s0": "a1", "s1": "a2"}))
    ec = find_bad_ec(bad, FIG3.rabin_pairs, FIG3.states)
    assert ec is not None
    assert ec.states == frozenset({"s1"})


def test_find_bad_ec_digs_below_good_mec():
    # the big loop x<->y satisfies the pair, but the system can also sit
    # still at y forever, which satisfies nothing; that sub-EC must surface
    g = StochasticGame.build(
        states=["x", "y"],
        system_states=["y"],
        initial=["x"],
        gamma=Fraction(1, 2),
        transitions=[
            ("x", "go", "y", 1),
            ("y", "back", "x", 1),
            ("y", "stay", "y", 1),
        ],
        rabin_pairs=[([], ["x"])],
    )
    ec = find_bad_ec(game_as_mdp(g), g.rabin_pairs, g.states)
    assert ec is not None
    assert ec.states == frozenset({"y"})
    assert ec.actions["y"] == frozenset({"stay"})


def test_find_bad_ec_restricted_start_states():
    bad = fix_system_strategy(FIG3, MemorylessStrategy.deterministic(
        {"s0": "a1", "s1": "a2"}))
    assert find_bad_ec(bad, FIG3.rabin_pairs, []) is None


# ------------------------------------------------------------- verification

def test_verify_fig3_witness_and_loser():
    win = MemorylessStrategy.deterministic({"s0": "a0", "s1": "a3"})
    verdict = verify_almost_sure(FIG3, win)
    assert verdict.winning
    assert verdict.witness_bad_ec is None
    assert verdict.per_state_winning == {"s0": True, "s1": True}

    lose = MemorylessStrategy.deterministic({"s0": "a1", "s1": "a2"})
    verdict = verify_almost_sure(FIG3, lose)
    assert not verdict.winning
    assert verdict.witness_bad_ec.states == frozenset({"s1"})
    assert verdict.per_state_winning == {"s0": False, "s1": False}


def test_verify_fig1_choices():
    reset = MemorylessStrategy.deterministic({"q1": "a2"})
    assert verify_almost_sure(FIG1, reset).winning
    greedy = MemorylessStrategy.deterministic({"q1": "a1"})
    verdict = verify_almost_sure(FIG1, greedy)
    assert not verdict.winning
    # the coin pushes every run into q1 eventually, so holding a1
    # forever loses from q0 as well
    assert verdict.per_state_winning == {"q0": False, "q1": False}
    assert verdict.witness_bad_ec.states == frozenset({"q1"})


def test_verify_check_states_narrow_aggregate():
    # per-state results always cover the whole game; check_states only
    # picks which of them the aggregate verdict quantifies over
    win = MemorylessStrategy.deterministic({"s0": "a0", "s1": "a3"})
    verdict = verify_almost_sure(FIG3, win, check_states=["s1"])
    assert verdict.winning
    assert set(verdict.per_state_winning) == set(FIG3.states)


def test_verify_mixed_strategy_support_only():
    # mixing the reset action in with any positive weight rescues q1
    for w in (Fraction(1, 1000), Fraction(1, 2), Fraction(999, 1000)):
        sigma = MemorylessStrategy({"q1": {"a1": 1 - w, "a2": w}})
        assert verify_almost_sure(FIG1, sigma).winning


# ------------------------------------------------------------------- region

def test_region_goldens():
    assert almost_sure_region(FIG1).region == frozenset({"q0", "q1"})
    assert almost_sure_region(FIG2).region == frozenset({"q0", "q2"})
    assert almost_sure_region(FIG3).region == frozenset({"s0", "s1"})


def test_region_witness_is_certified():
    for g in (FIG1, FIG2, FIG3):
        res = almost_sure_region(g)
        verdict = verify_almost_sure(g, res.witness, check_states=res.region)
        assert verdict.winning


def test_region_fig3_witness_golden():
    res = almost_sure_region(FIG3)
    assert res.witness.action_of("s0") == "a0"
    assert res.witness.action_of("s1") == "a3"


def test_empty_region_and_require_nonempty():
    g = StochasticGame.build(
        states=["s"],
        system_states=["s"],
        initial=["s"],
        gamma=Fraction(1, 2),
        transitions=[("s", "a", "s", 1)],
        rabin_pairs=[(["s"], [])],
    )
    assert almost_sure_region(g).region == frozenset()
    with pytest.raises(RegionEmptyError):
        almost_sure_region(g, require_nonempty=True)


def test_region_budget_exhaustion():
    with pytest.raises(BudgetExceededError):
        almost_sure_region(FIG2, max_strategies=1)


def test_region_matches_oracle_on_random_games():
    for seed in range(40):
        g = random_game(seed)
        assert almost_sure_region(g).region == oracle_as_region(g), seed


def test_region_matches_oracle_on_larger_games():
    for seed in range(8):
        g = random_game(1000 + seed, max_states=8)
        assert almost_sure_region(g).region == oracle_as_region(g), seed


def test_losing_states_never_rescued_by_any_strategy():
    # brute confirmation of the complement: every state outside the
    # region fails verification under every deterministic strategy
    for seed in (3, 11, 27):
        g = random_game(seed)
        region = almost_sure_region(g).region
        outside = set(g.states) - region
        for k in range(30):
            sigma = random_det_strategy(g, 97 * seed + k)
            verdict = verify_almost_sure(g, sigma)
            assert not any(verdict.per_state_winning[s] for s in outside)
