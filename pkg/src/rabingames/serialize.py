"""JSON encodings for games, strategies, verdicts and synthesis results.

Games read from disk are fully rational: JSON floats are parsed from their
decimal text (`0.999` becomes 999/1000 exactly), and exact numbers are
written back as "p/q" strings, so load(save(g)) == g for rational games.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .errors import GameFormatError, InvalidGameError
from .game import StochasticGame, validate_game
from .numeric import Num, emit_number, parse_number
from .qualitative import ASVerdict
from .quantitative import ValueFunction
from .strategy import FiniteMemoryStrategy, MemorylessStrategy, Strategy
from .synthesis import SynthesisResult


def _num(obj: Any, where: str) -> Num:
    try:
        return parse_number(obj)
    except ValueError as exc:
        raise GameFormatError(f"{where}: {exc}") from exc


def _str_list(obj: Any, where: str) -> list[str]:
    if not isinstance(obj, list) or not all(isinstance(x, str) for x in obj):
        raise GameFormatError(f"{where}: expected a list of strings")
    return obj


def _get(obj: Mapping, field: str, where: str) -> Any:
    if field not in obj:
        raise GameFormatError(f"{where}: missing field {field!r}")
    return obj[field]


def game_from_obj(obj: Any) -> StochasticGame:
    if not isinstance(obj, dict):
        raise GameFormatError("game: expected a JSON object")
    states = _str_list(_get(obj, "states", "game"), "states")
    system = _str_list(_get(obj, "system_states", "game"), "system_states")
    initial = _str_list(_get(obj, "initial", "game"), "initial")
    gamma = _num(_get(obj, "gamma", "game"), "gamma")
    raw_rows = _get(obj, "transitions", "game")
    if not isinstance(raw_rows, list):
        raise GameFormatError("transitions: expected a list")
    rows = []
    for i, row in enumerate(raw_rows):
        where = f"transitions[{i}]"
        if not isinstance(row, dict):
            raise GameFormatError(f"{where}: expected an object")
        src = _get(row, "from", where)
        act = _get(row, "action", where)
        dst = _get(row, "to", where)
        if not all(isinstance(x, str) for x in (src, act, dst)):
            raise GameFormatError(f"{where}: 'from', 'action' and 'to' must be strings")
        prob = _num(_get(row, "prob", where), f"{where}.prob")
        reward = _num(row["reward"], f"{where}.reward") if "reward" in row else 0
        rows.append((src, act, dst, prob, reward))
    raw_pairs = _get(obj, "rabin_pairs", "game")
    if not isinstance(raw_pairs, list):
        raise GameFormatError("rabin_pairs: expected a list")
    pairs = []
    for i, pair in enumerate(raw_pairs):
        where = f"rabin_pairs[{i}]"
        if not isinstance(pair, dict):
            raise GameFormatError(f"{where}: expected an object")
        pairs.append(
            (
                _str_list(_get(pair, "E", where), f"{where}.E"),
                _str_list(_get(pair, "F", where), f"{where}.F"),
            )
        )
    try:
        return StochasticGame.build(
            states=states,
            system_states=system,
            initial=initial,
            gamma=gamma,
            transitions=rows,
            rabin_pairs=pairs,
        )
    except ValueError as exc:
        raise GameFormatError(str(exc)) from exc


def game_to_obj(g: StochasticGame) -> dict:
    rows = []
    for s in g.states:
        for a in g.actions_of(s):
            for t, p in g.transition[(s, a)].items():
                rows.append(
                    {
                        "from": s,
                        "action": a,
                        "to": t,
                        "prob": emit_number(p),
                        "reward": emit_number(g.reward_of(s, a, t)),
                    }
                )
    return {
        "states": list(g.states),
        "system_states": sorted(g.system_states),
        "initial": list(g.initial),
        "gamma": emit_number(g.gamma),
        "transitions": rows,
        "rabin_pairs": [
            {"E": sorted(p.E), "F": sorted(p.F)} for p in g.rabin_pairs
        ],
    }


def load_game(path: str | Path, validate: bool = True) -> StochasticGame:
    """Read a game file; decimal literals are parsed exactly.  With
    validate=True (the default) a structurally invalid game is rejected."""
    with open(path) as handle:
        try:
            obj = json.load(handle, parse_float=Fraction)
        except json.JSONDecodeError as exc:
            raise GameFormatError(f"{path}: {exc}") from exc
    g = game_from_obj(obj)
    if validate:
        report = validate_game(g)
        if not report.valid:
            raise InvalidGameError(report.violations)
    return g


def save_game(g: StochasticGame, path: str | Path) -> None:
    Path(path).write_text(json.dumps(game_to_obj(g), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


def _memory_key(s: str, m: int) -> str:
    return f"{s}@{m}"


def _parse_memory_key(key: str, where: str) -> tuple[str, int]:
    try:
        s, m = key.rsplit("@", 1)
        return s, int(m)
    except ValueError as exc:
        raise GameFormatError(f"{where}: key {key!r} is not of the form 'state@memory'") from exc


def strategy_to_obj(sigma: Strategy) -> dict:
    if isinstance(sigma, MemorylessStrategy):
        return {
            "type": "memoryless",
            "choice": {
                s: {a: emit_number(p) for a, p in sorted(dist.items())}
                for s, dist in sorted(sigma.choice.items())
            },
        }
    return {
        "type": "finite",
        "memory_size": sigma.memory_size,
        "initial": sigma.initial_memory,
        "update": {
            _memory_key(s, m): m2 for (s, m), m2 in sorted(sigma.update.items())
        },
        "choice": {
            _memory_key(s, m): {a: emit_number(p) for a, p in sorted(dist.items())}
            for (s, m), dist in sorted(sigma.choice.items())
        },
    }


def strategy_from_obj(obj: Any) -> Strategy:
    if not isinstance(obj, dict):
        raise GameFormatError("strategy: expected a JSON object")
    kind = _get(obj, "type", "strategy")
    if kind not in ("memoryless", "finite"):
        raise GameFormatError(f"strategy.type: unknown type {kind!r}")
    raw_choice = _get(obj, "choice", "strategy")
    if not isinstance(raw_choice, dict):
        raise GameFormatError("strategy.choice: expected an object")
    if kind == "memoryless":
        choice = {}
        for s, dist in raw_choice.items():
            if not isinstance(dist, dict):
                raise GameFormatError(f"strategy.choice[{s!r}]: expected an object")
            choice[s] = {
                a: _num(p, f"strategy.choice[{s!r}][{a!r}]") for a, p in dist.items()
            }
        return MemorylessStrategy(choice)
    if kind == "finite":
        size = _get(obj, "memory_size", "strategy")
        if not isinstance(size, int) or size < 1:
            raise GameFormatError("strategy.memory_size: expected a positive integer")
        initial = _get(obj, "initial", "strategy")
        raw_update = _get(obj, "update", "strategy")
        if not isinstance(raw_update, dict):
            raise GameFormatError("strategy.update: expected an object")
        update = {}
        for key, m2 in raw_update.items():
            s, m = _parse_memory_key(key, "strategy.update")
            if not isinstance(m2, int):
                raise GameFormatError(f"strategy.update[{key!r}]: expected an integer")
            update[(s, m)] = m2
        choice = {}
        for key, dist in raw_choice.items():
            s, m = _parse_memory_key(key, "strategy.choice")
            if not isinstance(dist, dict):
                raise GameFormatError(f"strategy.choice[{key!r}]: expected an object")
            choice[(s, m)] = {
                a: _num(p, f"strategy.choice[{key!r}][{a!r}]") for a, p in dist.items()
            }
        return FiniteMemoryStrategy(tuple(range(size)), initial, update, choice)


def load_strategy(path: str | Path) -> Strategy:
    with open(path) as handle:
        try:
            obj = json.load(handle, parse_float=Fraction)
        except json.JSONDecodeError as exc:
            raise GameFormatError(f"{path}: {exc}") from exc
    return strategy_from_obj(obj)


def save_strategy(sigma: Strategy, path: str | Path) -> None:
    Path(path).write_text(json.dumps(strategy_to_obj(sigma), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


def values_to_obj(vf: ValueFunction) -> dict:
    return {
        "values": {s: emit_number(v) for s, v in sorted(vf.values.items())},
        "error_bound": emit_number(vf.error_bound),
    }


def verdict_to_obj(verdict: ASVerdict) -> dict:
    return {
        "winning": verdict.winning,
        "bad_ec": sorted(verdict.witness_bad_ec.states) if verdict.witness_bad_ec else None,
        "per_state": {s: verdict.per_state_winning[s] for s in sorted(verdict.per_state_winning)},
    }


def result_to_obj(result: SynthesisResult) -> dict:
    obj: dict[str, Any] = {"kind": result.kind}
    if result.strategy is not None:
        obj["strategy"] = strategy_to_obj(result.strategy)
    if result.values is not None:
        obj["values"] = values_to_obj(result.values)
    if result.optimal_values is not None:
        obj["optimal_values"] = values_to_obj(result.optimal_values)
    if result.as_verdict is not None:
        obj["almost_sure"] = verdict_to_obj(result.as_verdict)
    if result.epsilon is not None:
        obj["epsilon"] = emit_number(result.epsilon)
    if result.split_prob is not None:
        obj["split_prob"] = emit_number(result.split_prob)
    if result.switch_count is not None:
        obj["switch_count"] = result.switch_count
    return obj
