"""Strategy synthesis for turn-based stochastic games with Rabin winning
conditions and discounted rewards.

The system player seeks strategies that win with probability one against an
adversarial environment while giving up as little discounted reward as
possible.  `solve_optimal` finds a memoryless strategy that is both
almost-sure winning and value-optimal when one exists; `solve_epsilon`
always returns an almost-sure winning strategy within epsilon of the best
almost-sure value, memoryless when possible and finite-memory otherwise.
"""

from .errors import (
    BudgetExceededError,
    GameFormatError,
    InvalidGameError,
    InvalidStrategyError,
    NotClosedError,
    PreconditionViolatedError,
    RegionEmptyError,
)
from .game import (
    RabinPair,
    StochasticGame,
    ValidationReport,
    induced_subgame,
    prune_unreachable,
    reachable_states,
    validate_game,
)
from .oracle import (
    OracleBudget,
    enumerate_all_ecs,
    enumerate_det_memoryless,
    oracle_as_region,
    oracle_exact_values,
)
from .qualitative import (
    ASRegionResult,
    ASVerdict,
    EndComponent,
    almost_sure_region,
    find_bad_ec,
    maximal_end_components,
    rabin_good,
    verify_almost_sure,
)
from .quantitative import (
    OptimalActionSets,
    ValueFunction,
    bellman_backup,
    discounted_tail_bound,
    optimal_action_sets,
    q_value,
    solve_values,
    strategy_value,
    value_iteration,
)
from .sim import RunSample, SimulationStats, simulate
from .strategy import (
    EnvMDP,
    FiniteMemoryStrategy,
    MemorylessStrategy,
    Move,
    fix_system_strategy,
    game_as_mdp,
    product_game,
)
from .synthesis import (
    KIND_EPSILON_FINITE,
    KIND_EPSILON_MEMORYLESS,
    KIND_NONE,
    KIND_OPTIMAL,
    SplitGame,
    SynthesisResult,
    build_split_game,
    memory_bound,
    memoryless_condition_holds,
    project_split_strategy,
    restrict_to_optimal,
    solve_epsilon,
    solve_optimal,
    suboptimality_budget,
    switch_strategy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
