"""Backend selection for the Bellman-backup sweep.

The compiled Cython kernel is preferred; the numpy implementation has
identical semantics and is used when the extension is unavailable or when
RABINGAMES_PURE_PYTHON is set in the environment.
"""

import os

from .compile import CompiledGame, compile_game

if os.environ.get("RABINGAMES_PURE_PYTHON"):
    from ._backup_py import backup_sweep

    BACKEND = "python"
else:
    try:
        from ._backup import backup_sweep  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from ._backup_py import backup_sweep  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["BACKEND", "CompiledGame", "backup_sweep", "compile_game"]
