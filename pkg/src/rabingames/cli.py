"""Command line front end.

Every command prints one JSON document on stdout.  Exit codes: 0 on
success, 1 on unreadable or invalid input, 2 when a precondition fails
(some initial state lies outside the almost-sure winning region).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import corpus
from .errors import (
    BudgetExceededError,
    GameFormatError,
    InvalidGameError,
    InvalidStrategyError,
    NotClosedError,
    PreconditionViolatedError,
    RegionEmptyError,
)
from .game import StochasticGame, validate_game
from .numeric import parse_number
from .oracle import oracle_as_region, oracle_exact_values
from .qualitative import almost_sure_region, verify_almost_sure
from .quantitative import ValueFunction, solve_values, strategy_value
from .serialize import (
    load_game,
    load_strategy,
    result_to_obj,
    strategy_to_obj,
    values_to_obj,
    verdict_to_obj,
)
from .sim import simulate
from .synthesis import solve_epsilon, solve_optimal


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabin-games",
        description="Synthesize and check almost-sure winning strategies in "
        "stochastic Rabin games with discounted rewards.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str, **flags) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_)
        cmd.add_argument("--game", required=True,
                         help="game file (or bundled name: fig1, fig2, fig3)")
        cmd.add_argument("--gamma", default=None,
                         help="override the game's discount factor (number or p/q)")
        if flags.get("mode"):
            cmd.add_argument("--mode", choices=["exact", "iterative"], default="exact")
            cmd.add_argument("--tol", type=float, default=1e-9,
                             help="stopping tolerance of the iterative engine")
        if flags.get("engine"):
            cmd.add_argument("--engine", choices=["default", "oracle"], default="default",
                             help="oracle = exhaustive cross-checking engine")
        if flags.get("strategy"):
            cmd.add_argument("--strategy", required=flags["strategy"] == "required",
                             default=None, help="strategy file")
        cmd.add_argument("--out", default=None, help="also write the result JSON here")
        return cmd

    add("validate", "check a game file and report violations")
    add("region", "almost-sure winning region and witness strategy", engine=True)
    add("solve-optimal", "optimal almost-sure winning synthesis", mode=True)
    cmd = add("solve-epsilon", "epsilon-optimal almost-sure winning synthesis", mode=True)
    cmd.add_argument("--epsilon", required=True, help="slack (number or p/q)")
    add("verify", "is a strategy almost-sure winning from the initial states?",
        strategy="required")
    add("evaluate", "worst-case value of a strategy (or optimal values without one)",
        mode=True, engine=True, strategy="optional")
    cmd = add("simulate", "Monte-Carlo rollout of a strategy", strategy="required")
    cmd.add_argument("--env", default="best-response", choices=["best-response", "uniform"])
    cmd.add_argument("--env-strategy", default=None,
                     help="memoryless environment strategy file (overrides --env)")
    cmd.add_argument("--state", default=None, help="start state (default: least initial)")
    cmd.add_argument("--horizon", type=int, default=100)
    cmd.add_argument("--runs", type=int, default=1000)
    cmd.add_argument("--seed", type=int, default=0)
    return parser


def _load(args) -> StochasticGame:
    spec = args.game
    path = Path(spec)
    if not path.exists() and spec in corpus.NAMES:
        path = corpus.path(spec)
    g = load_game(path, validate=args.command != "validate")
    if args.gamma is not None:
        g = g.with_gamma(parse_number(args.gamma))
    return g


def _run(args) -> dict:
    g = _load(args)
    if args.command == "validate":
        report = validate_game(g)
        return {"valid": report.valid, "violations": list(report.violations)}
    if args.command == "region":
        if args.engine == "oracle":
            return {"region": sorted(oracle_as_region(g)), "witness": None}
        result = almost_sure_region(g)
        return {
            "region": sorted(result.region),
            "witness": strategy_to_obj(result.witness),
        }
    if args.command == "solve-optimal":
        return result_to_obj(solve_optimal(g, args.mode, args.tol))
    if args.command == "solve-epsilon":
        epsilon = parse_number(args.epsilon)
        return result_to_obj(solve_epsilon(g, epsilon, args.mode, args.tol))
    if args.command == "verify":
        sigma = load_strategy(args.strategy)
        return verdict_to_obj(verify_almost_sure(g, sigma))
    if args.command == "evaluate":
        if args.strategy is None:
            if args.engine == "oracle":
                return values_to_obj(ValueFunction(oracle_exact_values(g), 0))
            return values_to_obj(solve_values(g, args.mode, args.tol))
        if args.engine == "oracle":
            raise ValueError("the oracle engine evaluates optimal values only; "
                             "drop --strategy or use --engine default")
        sigma = load_strategy(args.strategy)
        return values_to_obj(strategy_value(g, sigma, args.mode, args.tol))
    if args.command == "simulate":
        sigma = load_strategy(args.strategy)
        env = (
            load_strategy(args.env_strategy)
            if args.env_strategy
            else args.env.replace("-", "_")
        )
        stats = simulate(
            g, sigma,
            horizon=args.horizon, runs=args.runs, seed=args.seed,
            env=env, start=args.state,
        )
        return stats.to_obj()
    raise AssertionError(f"unhandled command {args.command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    try:
        obj = _run(args)
    except (PreconditionViolatedError, RegionEmptyError) as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}))
        return 2
    except (
        GameFormatError,
        InvalidGameError,
        InvalidStrategyError,
        NotClosedError,
        BudgetExceededError,
        ValueError,
        TypeError,
        OSError,
        KeyError,
    ) as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}))
        return 1
    text = json.dumps(obj, indent=2)
    print(text)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    return 0


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
