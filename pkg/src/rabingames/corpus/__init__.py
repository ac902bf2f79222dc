"""Bundled example games.

fig1: the environment only rarely hands control to the system, which must
balance staying in its rewarding loop against returning often enough to win.
fig2: committing to the rewarding branch loses almost-surely, so the best
almost-sure value is strictly below the unconstrained optimum.
fig3: winning requires leaving the only rewarding state, so no memoryless
strategy can be both almost-sure winning and near-optimal.
"""

from importlib import resources
from pathlib import Path

from ..game import StochasticGame
from ..serialize import load_game

NAMES = ("fig1", "fig2", "fig3")


def path(name: str) -> Path:
    if name not in NAMES:
        raise KeyError(f"unknown corpus game {name!r} (have {', '.join(NAMES)})")
    return Path(str(resources.files(__package__) / f"{name}.json"))


def load(name: str) -> StochasticGame:
    return load_game(path(name))
